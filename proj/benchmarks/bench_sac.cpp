#include <benchmark/benchmark.h>

#include "tanhshift/random.hpp"
#include "tanhshift/replay_buffer.hpp"
#include "tanhshift/sac.hpp"
#include "tanhshift/toy_env.hpp"

namespace {

using namespace tanhshift;

void BM_SacUpdate(benchmark::State& state) {
    EnvConfig env;
    env.d = 8;
    SacConfig cfg;
    SacAgent agent(env.d, env.d, cfg, 0);
    ReplayBuffer buffer(cfg.replay_capacity);
    Rng fill(1);
    for (int i = 0; i < 2000; ++i) {
        Transition t;
        t.s.resize(env.d);
        t.a.resize(env.d);
        t.s_next.resize(env.d);
        for (std::size_t k = 0; k < env.d; ++k) {
            t.s[k] = fill.uniform(-0.9, 0.9);
            t.a[k] = fill.uniform(-1.0, 1.0);
            t.s_next[k] = fill.uniform(-0.9, 0.9);
        }
        t.r = fill.gaussian();
        t.done = (i % 10) == 9;
        buffer.push(std::move(t));
    }
    Rng replay_rng(2);
    Rng noise_rng(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agent.update(buffer, replay_rng, noise_rng));
    }
}
BENCHMARK(BM_SacUpdate);

void BM_PolicyAct(benchmark::State& state) {
    EnvConfig env;
    env.d = 8;
    SacConfig cfg;
    SacAgent agent(env.d, env.d, cfg, 0);
    std::vector<double> s(env.d, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agent.act_greedy(s));
    }
}
BENCHMARK(BM_PolicyAct);

}  // namespace
