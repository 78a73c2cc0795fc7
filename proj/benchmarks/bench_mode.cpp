#include <benchmark/benchmark.h>

#include "tanhshift/mode_solver.hpp"
#include "tanhshift/squashed_gaussian.hpp"

namespace {

using namespace tanhshift;

void BM_GridMode(benchmark::State& state) {
    const SquashedGaussian1D d(1.0, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_mode(d));
    }
}
BENCHMARK(BM_GridMode);

void BM_AnalyticMode(benchmark::State& state) {
    const SquashedGaussian1D d(1.0, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic_mode(d));
    }
}
BENCHMARK(BM_AnalyticMode);

void BM_AnalyticModeBimodal(benchmark::State& state) {
    const SquashedGaussian1D d(0.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic_mode(d));
    }
}
BENCHMARK(BM_AnalyticModeBimodal);

}  // namespace
