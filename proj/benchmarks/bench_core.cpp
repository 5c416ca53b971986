#include <benchmark/benchmark.h>

#include <vector>

#include "specmarket/agents.hpp"
#include "specmarket/estimators.hpp"
#include "specmarket/kesten.hpp"
#include "specmarket/reference.hpp"

using namespace specmarket;

static void bm_simulate_linear(benchmark::State& state) {
    ModelParams p = table1_general();
    p.T = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_linear(p, 42));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate_linear)->Arg(1000)->Arg(10000);

static void bm_simulate_speculative(benchmark::State& state) {
    ModelParams p = table1_speculative();
    p.T = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_speculative(p, 42));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate_speculative)->Arg(10000);

static void bm_simulate_agents(benchmark::State& state) {
    ModelParams p = table1_general();
    p.T = 200;
    const auto n = static_cast<std::size_t>(state.range(0));
    const TraderPopulation pop = make_population(n, n, p, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_agents(p, pop, 42));
    }
}
BENCHMARK(bm_simulate_agents)->Arg(1000)->Arg(10000);

static void bm_select_xmin(benchmark::State& state) {
    const auto x = pareto_sample(3.0, 1.0, static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_xmin(x));
    }
}
BENCHMARK(bm_select_xmin)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void bm_fit_tail(benchmark::State& state) {
    const auto x = pareto_sample(3.0, 1.0, 10000, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_tail(x, TailMethod::least_squares));
    }
}
BENCHMARK(bm_fit_tail)->Unit(benchmark::kMillisecond);

static void bm_sample_acf(benchmark::State& state) {
    const GarchPath path = garch_simulate(GarchParams{}, 10000, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_acf(path.r, AcfTransform::absolute, state.range(0)));
    }
}
BENCHMARK(bm_sample_acf)->Arg(10)->Arg(100);

static void bm_kesten_root(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(kesten_tail_root(0.55));
    }
}
BENCHMARK(bm_kesten_root);

BENCHMARK_MAIN();
