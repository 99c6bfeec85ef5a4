#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>

#include "rsched/error.hpp"
#include "rsched/instance.hpp"
#include "rsched/io.hpp"
#include "test_support.hpp"

using namespace rsched;
using rsched::testing::chain_edges;
using rsched::testing::make_instance;

namespace {

bool contains(const std::vector<std::string> &violations, std::string_view needle) {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string &v) { return v.find(needle) != std::string::npos; });
}

std::size_t edge_count(const Matrix<int> &adj) {
    const auto v = adj.values();
    return static_cast<std::size_t>(std::accumulate(v.begin(), v.end(), 0));
}

class TempDir {
  public:
    TempDir() : path_(std::filesystem::temp_directory_path() / ("rsched-test-" + std::to_string(::getpid()))) {
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path &path() const { return path_; }

  private:
    std::filesystem::path path_;
};

} // namespace

TEST(Validate, WellFormedChainHasNoViolations) {
    EXPECT_TRUE(validate(make_instance(3, 2, chain_edges(3))).empty());
}

TEST(Validate, TwoCycleIsReported) {
    auto inst = make_instance(3, 2, {{1, 0}, {0, 1}});
    EXPECT_TRUE(contains(validate(inst), "cycle"));
}

TEST(Validate, NonzeroDiagonalVolumeIsASelfEdge) {
    auto inst = make_instance(3, 2, chain_edges(3));
    inst.graph.data_volume(2, 2) = 5;
    EXPECT_TRUE(contains(validate(inst), "self-edge"));
}

TEST(Validate, ReportsEachBrokenPlatformInvariant) {
    auto inst = make_instance(2, 2, {});
    inst.platform.exec_time(0, 1) = 0.0;
    inst.platform.link_delay(1, 1) = 0.3;
    inst.platform.proc_failure.pop_back();
    const auto v = validate(inst);
    EXPECT_TRUE(contains(v, "exec_time(0,1)"));
    EXPECT_TRUE(contains(v, "link_delay diagonal"));
    EXPECT_TRUE(contains(v, "proc_failure"));
    EXPECT_EQ(v.size(), 3u);
}

TEST(Validate, VolumeOffEdgeSupportIsReported) {
    auto inst = make_instance(3, 1, chain_edges(3));
    inst.graph.data_volume(0, 2) = 1.0; // no predecessor entry for this
    EXPECT_TRUE(contains(validate(inst), "not an edge"));
}

TEST(PMethod, EpsilonOneIsTotallySequential) {
    Rng rng(7);
    const auto adj = generate_pmethod(4, 1.0, rng);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            EXPECT_EQ(adj(i, j), j > i ? 1 : 0);
}

TEST(PMethod, EpsilonZeroIsInherentlyParallel) {
    Rng rng(7);
    EXPECT_EQ(edge_count(generate_pmethod(4, 0.0, rng)), 0u);
}

TEST(PMethod, LowerTriangleAndDiagonalStayZero) {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto adj = generate_pmethod(12, 0.7, rng);
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                ASSERT_EQ(adj(i, j), 0);
    }
}

TEST(PMethod, MeanEdgeCountMatchesBinomialMean) {
    Rng rng(2024);
    double total = 0.0;
    constexpr int draws = 10000;
    for (int k = 0; k < draws; ++k)
        total += static_cast<double>(edge_count(generate_pmethod(10, 0.5, rng)));
    EXPECT_NEAR(total / draws, 22.5, 0.225);
}

TEST(PMethod, RejectsEpsilonOutsideUnitInterval) {
    Rng rng(1);
    EXPECT_THROW(generate_pmethod(4, 1.5, rng), ParameterError);
    EXPECT_THROW(generate_pmethod(4, -0.1, rng), ParameterError);
}

TEST(ExecTimes, ExponentialSampleMean) {
    Rng rng(5);
    const auto m = generate_exec_times(1000, 100, Distribution::Exponential, 5.0, rng);
    const auto v = m.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    EXPECT_GE(mean, 4.9);
    EXPECT_LE(mean, 5.1);
}

TEST(ExecTimes, NormalSampleMean) {
    Rng rng(6);
    const auto m = generate_exec_times(1000, 100, Distribution::Normal, 5.0, rng);
    const auto v = m.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    EXPECT_GE(mean, 4.9);
    EXPECT_LE(mean, 5.1);
}

TEST(ExecTimes, DrawsAreStrictlyPositive) {
    Rng rng(8);
    // A tiny mean makes the exponential tail hit the floor regularly.
    for (auto dist : {Distribution::Exponential, Distribution::Normal}) {
        const auto m = generate_exec_times(200, 50, dist, 0.002, rng);
        for (double x : m.values())
            ASSERT_GE(x, kMinDuration);
    }
}

TEST(ExecTimes, NonpositiveMeanIsRejected) {
    Rng rng(1);
    EXPECT_THROW(generate_exec_times(2, 2, Distribution::Normal, 0.0, rng), ParameterError);
    EXPECT_THROW(generate_exec_times(2, 2, Distribution::Normal, -3.0, rng), ParameterError);
}

TEST(DataVolumes, EdgelessGraphGivesZeroMatrix) {
    Rng rng(3);
    const auto v = generate_data_volumes(Matrix<int>(5, 5, 0), rng);
    for (double x : v.values())
        EXPECT_EQ(x, 0.0);
}

TEST(DataVolumes, SupportEqualsAdjacencyAndValuesAreIntegersInRange) {
    Rng rng(4);
    const auto adj = generate_pmethod(15, 0.5, rng);
    const auto vol = generate_data_volumes(adj, rng);
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 15; ++j) {
            EXPECT_EQ(vol(i, j) != 0.0, adj(i, j) == 1);
            if (adj(i, j)) {
                EXPECT_GE(vol(i, j), 1.0);
                EXPECT_LE(vol(i, j), 10.0);
                EXPECT_EQ(vol(i, j), std::floor(vol(i, j)));
            }
        }
}

TEST(DataVolumes, SingleEdgeIsReproducible) {
    Matrix<int> adj(2, 2, 0);
    adj(0, 1) = 1;
    Rng a(99), b(99);
    EXPECT_EQ(generate_data_volumes(adj, a)(0, 1), generate_data_volumes(adj, b)(0, 1));
}

TEST(FailureRates, AllRatesInRangeWithZeroDiagonal) {
    Rng rng(12);
    const auto rates = generate_failure_rates(5, rng);
    for (double r : rates.proc) {
        EXPECT_GE(r, 0.0000075);
        EXPECT_LE(r, 0.0000125);
    }
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t b = 0; b < 5; ++b) {
            if (k == b) {
                EXPECT_EQ(rates.link(k, k), 0.0);
            } else {
                EXPECT_GE(rates.link(k, b), 0.0000075);
                EXPECT_LE(rates.link(k, b), 0.0000125);
            }
        }
}

TEST(FailureRates, SingleProcessorLinkMatrixIsZero) {
    Rng rng(12);
    const auto rates = generate_failure_rates(1, rng);
    ASSERT_EQ(rates.link.rows(), 1u);
    EXPECT_EQ(rates.link(0, 0), 0.0);
}

TEST(Deadlines, SourceTaskIsSlowestExecPlusSlack) {
    auto inst = make_instance(1, 2, {});
    inst.platform.exec_time(0, 0) = 3.0;
    inst.platform.exec_time(0, 1) = 7.0;
    Rng rng(21), replay(21);
    const auto d = generate_deadlines(inst.graph, inst.platform, Distribution::Exponential, rng);
    const double slack = draw_duration(Distribution::Exponential, 5.0, replay);
    EXPECT_DOUBLE_EQ(d[0], 7.0 + slack);
}

TEST(Deadlines, ChainDeadlinesFollowTheFormulaAndIncrease) {
    // exec (i, m) = 1 + i + m; volumes 1, 2; link delays 0.5 / 0.8.
    auto inst = make_instance(3, 2, chain_edges(3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t m = 0; m < 2; ++m)
            inst.platform.exec_time(i, m) = 1.0 + static_cast<double>(i + m);
    inst.graph.data_volume(1, 2) = 2.0;
    inst.platform.link_delay(1, 0) = 0.8;

    Rng rng(77), replay(77);
    const auto d = generate_deadlines(inst.graph, inst.platform, Distribution::Normal, rng);

    // tE = [0, 1, 1 + 2], slowest = [2, 3, 4], mean = [1.5, 2.5, 3.5], comm = [0, 1 * 0.8, 2 * 0.8].
    const double r0 = draw_duration(Distribution::Normal, 1.5, replay);
    const double r1 = draw_duration(Distribution::Normal, 2.5, replay);
    const double r2 = draw_duration(Distribution::Normal, 3.5, replay);
    EXPECT_DOUBLE_EQ(d[0], 0.0 + 2.0 + r0 + 0.0);
    EXPECT_DOUBLE_EQ(d[1], 1.0 + 3.0 + r1 + 0.8);
    EXPECT_DOUBLE_EQ(d[2], 3.0 + 4.0 + r2 + 1.6);
    EXPECT_LE(d[0], d[1]);
    EXPECT_LE(d[1], d[2]);
}

TEST(Deadlines, AllPositive) {
    GeneratorOptions options;
    options.n_tasks = 30;
    options.n_procs = 3;
    options.seed = 5;
    for (auto dist : {Distribution::Normal, Distribution::Exponential}) {
        options.dist = dist;
        const auto inst = generate_instance(options);
        ASSERT_TRUE(inst.deadlines);
        for (double d : *inst.deadlines)
            EXPECT_GT(d, 0.0);
    }
}

TEST(GenerateInstance, ValidAndDeterministicAcrossSeeds) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GeneratorOptions options;
        options.n_tasks = 1 + seed % 12;
        options.n_procs = 1 + seed % 4;
        options.epsilon = static_cast<double>(seed % 5) / 4.0;
        options.dist = seed % 2 ? Distribution::Normal : Distribution::Exponential;
        options.seed = seed;
        const auto a = generate_instance(options);
        EXPECT_TRUE(validate(a).empty()) << "seed " << seed;
        EXPECT_EQ(serialize_instance(a), serialize_instance(generate_instance(options)));
    }
}

TEST(InstanceFile, RoundTripIsExactAndByteIdentical) {
    GeneratorOptions options;
    options.n_tasks = 10;
    options.n_procs = 2;
    options.seed = 42;
    const auto inst = generate_instance(options);
    TempDir dir;
    const auto path = dir.path() / "instance.txt";
    save_instance(inst, path);
    const auto loaded = load_instance(path);
    EXPECT_EQ(loaded, inst);
    EXPECT_EQ(serialize_instance(loaded), read_file(path));
}

TEST(InstanceFile, InstanceWithoutDeadlinesRoundTrips) {
    const auto inst = make_instance(4, 3, chain_edges(4));
    EXPECT_EQ(parse_instance(serialize_instance(inst)), inst);
}

TEST(InstanceFile, TruncatedFileIsAParseError) {
    GeneratorOptions options;
    options.seed = 3;
    const auto text = serialize_instance(generate_instance(options));
    for (std::size_t cut : {text.size() / 5, text.size() / 2, text.size() - 5})
        EXPECT_THROW(parse_instance(std::string_view(text).substr(0, cut)), ParseError) << "cut " << cut;
}

TEST(InstanceFile, ParseErrorNamesTheField) {
    auto text = serialize_instance(make_instance(2, 2, {{0, 1}}));
    text.replace(text.find("exec_time 2 2\n") + 14, 1, "x");
    try {
        parse_instance(text);
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.field(), "exec_time");
    }
}

TEST(InstanceFile, ZeroTasksIsAValidationError) {
    const std::string text = "rsched-instance 1\nn_tasks 0\nn_procs 1\ndata_volume 0 0\nexec_time 0 1\n"
                             "proc_failure 1\n1e-05\nlink_failure 1 1\n0\nlink_delay 1 1\n0\ndeadlines 0\nend\n";
    EXPECT_THROW(parse_instance(text), ValidationError);
}

TEST(InstanceFile, UnknownVersionIsAVersionError) {
    auto text = serialize_instance(make_instance(2, 1, {}));
    text.replace(0, std::string("rsched-instance 1").size(), "rsched-instance 9");
    EXPECT_THROW(parse_instance(text), VersionError);
}

TEST(InstanceFile, CyclicGraphIsAValidationError) {
    auto text = serialize_instance(make_instance(2, 1, {{0, 1}}));
    text.replace(text.find("data_volume 2 2\n0 1\n0 0\n"), 24, "data_volume 2 2\n0 1\n1 0\n");
    EXPECT_THROW(parse_instance(text), ValidationError);
}
