#include <benchmark/benchmark.h>

#include "tanhshift/eval_stats.hpp"
#include "tanhshift/random.hpp"

namespace {

using namespace tanhshift;

ScoreMatrix make_matrix(std::size_t runs, std::size_t episodes) {
    ScoreMatrix m;
    Rng rng(7);
    for (std::size_t r = 0; r < runs; ++r) {
        std::vector<double> row(episodes);
        for (double& v : row) v = rng.uniform();
        m.scores.push_back(std::move(row));
    }
    return m;
}

void BM_Iqm(benchmark::State& state) {
    const ScoreMatrix m = make_matrix(10, 10);
    std::vector<double> pooled;
    for (const auto& row : m.scores) pooled.insert(pooled.end(), row.begin(), row.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(iqm(pooled));
    }
}
BENCHMARK(BM_Iqm);

void BM_BootstrapCi(benchmark::State& state) {
    const ScoreMatrix m = make_matrix(10, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stratified_bootstrap_ci(AggregateMetric::Iqm, m, 2000, 0.95, 0));
    }
}
BENCHMARK(BM_BootstrapCi);

}  // namespace
