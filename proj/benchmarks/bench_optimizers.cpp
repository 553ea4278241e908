#include <benchmark/benchmark.h>

#include <string>

#include "qdopt/baselines.hpp"
#include "qdopt/bip.hpp"
#include "qdopt/harness.hpp"

namespace {

void BM_BipSweep(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    qdopt::BudgetedObjective obj(qdopt::make_objective("F2", dim), ~0ull >> 1);
    qdopt::BipConfig cfg;
    cfg.seed = 1;
    qdopt::BipOptimizer opt(obj, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(opt.step());
    state.SetItemsProcessed(static_cast<std::int64_t>(obj.evals_used()));
}

void BM_Trial(benchmark::State& state, const std::string& alg) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(qdopt::run_trial(alg, "F2", 10, 10000, 1, qdopt::AlgorithmSettings{}));
    }
}

}  // namespace

BENCHMARK(BM_BipSweep)->Arg(10)->Arg(30);
BENCHMARK_CAPTURE(BM_Trial, bip, std::string("bip"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Trial, bbpso, std::string("bbpso"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Trial, bbfwa, std::string("bbfwa"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Trial, gbde, std::string("gbde"))->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
