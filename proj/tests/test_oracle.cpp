#include <gtest/gtest.h>

#include <algorithm>

#include "rsched/error.hpp"
#include "rsched/nsga2.hpp"
#include "rsched/oracle.hpp"
#include "test_support.hpp"

using namespace rsched;
using rsched::testing::make_instance;

namespace {

Instance seeded_instance(std::uint64_t seed, std::size_t n, std::size_t m, double epsilon = 0.4) {
    GeneratorOptions options;
    options.n_tasks = n;
    options.n_procs = m;
    options.epsilon = epsilon;
    options.seed = seed;
    return generate_instance(options);
}

std::size_t enumerate_count(const Instance &inst) {
    return oracle::enumerate_legal_schedules(inst, [](const Schedule &) {});
}

} // namespace

TEST(Enumerate, SmallCounts) {
    EXPECT_EQ(enumerate_count(make_instance(1, 2, {})), 2u);
    EXPECT_EQ(enumerate_count(make_instance(2, 1, {})), 2u);
    EXPECT_EQ(enumerate_count(make_instance(2, 2, {{0, 1}})), 4u);
}

TEST(Enumerate, EveryScheduleIsLegalAndDistinct) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = seeded_instance(seed, 5, 1 + seed % 3);
        const auto heights = compute_heights(inst.graph);
        std::set<std::vector<std::vector<std::size_t>>> seen;
        const auto n = oracle::enumerate_legal_schedules(inst, [&](const Schedule &s) {
            EXPECT_TRUE(is_legal(s, heights));
            seen.insert(s.proc_lists);
        });
        EXPECT_EQ(seen.size(), n);
        EXPECT_EQ(n, oracle::count_legal_schedules(inst));
    }
}

TEST(Enumerate, CountOnIndependentTasks) {
    // Three independent tasks on two processors: every ordered split of a 3-set
    // into two lists, sum over k of C(3,k) k! (3-k)! = 4 * 3! = 24.
    EXPECT_EQ(enumerate_count(make_instance(3, 2, {})), 24u);
}

TEST(Enumerate, SizeGuard) {
    EXPECT_THROW(enumerate_count(make_instance(9, 2, {})), SizeError);
    EXPECT_THROW(enumerate_count(make_instance(3, 4, {})), SizeError);
    EXPECT_THROW(oracle::exact_pareto_front(seeded_instance(1, 50, 4)), SizeError);
}

TEST(Simulate, AgreesWithTheEngineOnEveryLegalSchedule) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto inst = seeded_instance(seed, 6, 2, 0.3 + 0.1 * static_cast<double>(seed));
        const Evaluator engine(inst);
        oracle::enumerate_legal_schedules(inst, [&](const Schedule &s) {
            ASSERT_TRUE(oracle::same_point(engine(s), oracle::simulate(s, inst)));
        });
    }
}

TEST(ExactFront, DominatingProcessorGivesOnePoint) {
    auto inst = make_instance(1, 2, {});
    inst.platform.exec_time(0, 0) = 2.0;
    inst.platform.exec_time(0, 1) = 3.0;
    const auto front = oracle::exact_pareto_front(inst);
    ASSERT_EQ(front.points.size(), 1u);
    EXPECT_EQ(front.witnesses[0], (Schedule{{{0}, {}}}));
}

TEST(ExactFront, TradeOffGivesTwoPoints) {
    auto inst = make_instance(1, 2, {});
    inst.platform.exec_time(0, 0) = 2.0;
    inst.platform.exec_time(0, 1) = 3.0;
    inst.platform.proc_failure[0] = 1e-5; // 2e-5 on proc 0
    inst.platform.proc_failure[1] = 5e-6; // 1.5e-5 on proc 1
    const auto front = oracle::exact_pareto_front(inst);
    ASSERT_EQ(front.points.size(), 2u);
    EXPECT_DOUBLE_EQ(front.points[0].makespan, 2.0);
    EXPECT_DOUBLE_EQ(front.points[1].makespan, 3.0);
}

TEST(ExactFront, EqualsTheNaiveFilterOfAllEnumeratedVectors) {
    const auto inst = seeded_instance(123, 6, 2);
    std::vector<ObjectiveVector> all;
    oracle::enumerate_legal_schedules(inst, [&](const Schedule &s) { all.push_back(oracle::simulate(s, inst)); });
    std::set<std::pair<double, double>> want;
    const auto fronts = rsched::testing::naive_fronts(all);
    for (std::size_t idx : fronts.front())
        want.emplace(all[idx].makespan, all[idx].reliability_cost);

    const auto front = oracle::exact_pareto_front(inst);
    std::set<std::pair<double, double>> got;
    for (std::size_t k = 0; k < front.points.size(); ++k) {
        got.emplace(front.points[k].makespan, front.points[k].reliability_cost);
        EXPECT_TRUE(oracle::same_point(oracle::simulate(front.witnesses[k], inst), front.points[k]));
    }
    EXPECT_EQ(got, want);
}

TEST(FrontDistance, IdentityIsFullCoverageZeroDeviation) {
    const auto front = oracle::exact_pareto_front(seeded_instance(4, 5, 2));
    const auto r = oracle::front_distance(front.points, front);
    EXPECT_DOUBLE_EQ(r.coverage, 1.0);
    EXPECT_DOUBLE_EQ(r.deviation, 0.0);
}

TEST(FrontDistance, SubsetAndDominatedPoint) {
    oracle::ExactFront exact;
    exact.points = {{1.0, 3e-5}, {2.0, 2e-5}, {3.0, 1e-5}};
    exact.witnesses.resize(3);
    const std::vector<ObjectiveVector> subset{{1.0, 3e-5}, {3.0, 1e-5}};
    const auto a = oracle::front_distance(subset, exact);
    EXPECT_LT(a.coverage, 1.0);
    EXPECT_DOUBLE_EQ(a.coverage, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(a.deviation, 0.0);

    const std::vector<ObjectiveVector> with_dominated{{1.0, 3e-5}, {2.5, 2.5e-5}};
    EXPECT_GT(oracle::front_distance(with_dominated, exact).deviation, 0.0);
}

TEST(FrontDistance, EmptyExactFrontIsAContractError) {
    EXPECT_THROW(oracle::front_distance(std::vector<ObjectiveVector>{}, oracle::ExactFront{}), ContractError);
}

TEST(FrontDistance, OneTaskInstanceIsAlwaysCovered) {
    auto inst = make_instance(1, 2, {});
    inst.platform.exec_time(0, 1) = 2.0;
    inst.platform.proc_failure[1] = 1e-6;
    for (auto alloc : {Allocation::RandomSplit, Allocation::RoundRobin}) {
        EvolutionConfig config;
        config.pop_size = 2;
        config.generations = 3;
        config.allocation = alloc;
        const auto result = run(inst, config);
        std::vector<ObjectiveVector> found;
        for (const auto &m : result.front)
            found.push_back(m.objectives);
        EXPECT_DOUBLE_EQ(oracle::front_distance(found, oracle::exact_pareto_front(inst)).coverage, 1.0);
    }
}
