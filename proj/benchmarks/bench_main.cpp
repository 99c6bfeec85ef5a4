#include <benchmark/benchmark.h>

#include "rsched/nsga2.hpp"
#include "rsched/oracle.hpp"

using namespace rsched;

namespace {

Instance bench_instance(std::size_t n, std::size_t m) {
    GeneratorOptions options;
    options.n_tasks = n;
    options.n_procs = m;
    options.seed = 1;
    return generate_instance(options);
}

void BM_Evaluate(benchmark::State &state) {
    const auto inst = bench_instance(static_cast<std::size_t>(state.range(0)), 4);
    const Evaluator evaluator(inst);
    Rng rng(1);
    const auto s = random_schedule(inst, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluator(s));
}
BENCHMARK(BM_Evaluate)->Arg(10)->Arg(50)->Arg(200);

void BM_NondominatedSort(benchmark::State &state) {
    Rng rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ObjectiveVector> pts(static_cast<std::size_t>(state.range(0)));
    for (auto &p : pts)
        p = {u(rng), u(rng)};
    for (auto _ : state)
        benchmark::DoNotOptimize(fast_nondominated_sort(pts));
}
BENCHMARK(BM_NondominatedSort)->Arg(40)->Arg(200)->Arg(1000);

void BM_Generation(benchmark::State &state) {
    const auto inst = bench_instance(static_cast<std::size_t>(state.range(0)), 4);
    const Evaluator evaluator(inst);
    const auto config = default_config(inst);
    Rng rng(3);
    auto pop = initial_population(evaluator, config, rng);
    for (auto _ : state)
        pop = evolve_generation(pop, config, evaluator, rng);
}
BENCHMARK(BM_Generation)->Arg(10)->Arg(50);

void BM_ExactFront(benchmark::State &state) {
    const auto inst = bench_instance(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle::exact_pareto_front(inst));
}
BENCHMARK(BM_ExactFront)->Arg(5)->Arg(6);

} // namespace
BENCHMARK_MAIN();
