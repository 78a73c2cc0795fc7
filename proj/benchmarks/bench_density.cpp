#include <benchmark/benchmark.h>

#include "tanhshift/squashed_gaussian.hpp"

namespace {

using namespace tanhshift;

void BM_LogPdf(benchmark::State& state) {
    const SquashedGaussian1D d(1.0, 0.5);
    double y = -0.95;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_pdf(d, y));
        y += 1e-9;
    }
}
BENCHMARK(BM_LogPdf);

void BM_Pdf(benchmark::State& state) {
    const SquashedGaussian1D d(1.0, 0.5);
    double y = -0.95;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pdf(d, y));
        y += 1e-9;
    }
}
BENCHMARK(BM_Pdf);

void BM_Cdf(benchmark::State& state) {
    const SquashedGaussian1D d(1.0, 0.5);
    double y = -0.95;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cdf(d, y));
        y += 1e-9;
    }
}
BENCHMARK(BM_Cdf);

void BM_JointLogPdf(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    DiagSquashedGaussian d(std::vector<double>(dim, 0.3), std::vector<double>(dim, 0.5));
    const std::vector<double> y(dim, 0.25);
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_log_pdf(d, y));
    }
}
BENCHMARK(BM_JointLogPdf)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
