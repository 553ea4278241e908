#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "qdopt/objective.hpp"

namespace {

void BM_Evaluate(benchmark::State& state, const std::string& id) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto spec = qdopt::make_objective(id, dim);
    std::mt19937_64 rng(1);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        x[i] = std::uniform_real_distribution<double>(spec.lower_bound[i], spec.upper_bound[i])(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(spec.evaluate(x));
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK_CAPTURE(BM_Evaluate, sphere, std::string("F7"))->Arg(10)->Arg(30);
BENCHMARK_CAPTURE(BM_Evaluate, rastrigin, std::string("F2"))->Arg(10)->Arg(30);
BENCHMARK_CAPTURE(BM_Evaluate, ackley, std::string("F3"))->Arg(10)->Arg(30);
BENCHMARK_CAPTURE(BM_Evaluate, rotated_ellipsoid, std::string("F9"))->Arg(10)->Arg(30);
