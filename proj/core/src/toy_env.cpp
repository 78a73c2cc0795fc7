#include "tanhshift/toy_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tanhshift {

void validate(const EnvConfig& cfg) {
    if (cfg.d < 1) throw std::invalid_argument("env config: d must be >= 1");
    if (cfg.horizon < 1) throw std::invalid_argument("env config: horizon must be >= 1");
    if (!(cfg.boundary_frac > 0.0 && cfg.boundary_frac < 1.0)) {
        throw std::invalid_argument("env config: boundary_frac must be in (0, 1)");
    }
    if (!(cfg.decay > 0.0 && cfg.decay < 1.0)) {
        throw std::invalid_argument("env config: decay must be in (0, 1)");
    }
    if (!(cfg.process_noise >= 0.0)) {
        throw std::invalid_argument("env config: process_noise must be >= 0");
    }
}

ToyEnv::ToyEnv(EnvConfig cfg) : cfg_(cfg) {
    validate(cfg_);
    state_.s.assign(cfg_.d, 0.0);
}

const EnvState& ToyEnv::reset(std::uint64_t episode_seed) {
    rng_ = Rng(derive_stream(cfg_.seed, episode_seed));
    const double b = cfg_.boundary_frac;
    for (double& si : state_.s) si = rng_.uniform(-b, b);
    state_.t = 0;
    return state_;
}

ToyEnv::StepResult ToyEnv::step(std::span<const double> a) {
    if (a.size() != cfg_.d) {
        throw std::invalid_argument("env step: action has dimension " + std::to_string(a.size()) +
                                    ", expected " + std::to_string(cfg_.d));
    }
    for (const double ai : a) {
        if (!(std::fabs(ai) <= 1.0)) {
            throw std::invalid_argument("env step: action component out of [-1, 1]: " +
                                        std::to_string(ai));
        }
    }
    if (state_.t >= cfg_.horizon) {
        throw std::logic_error("env step: episode already finished; call reset");
    }

    double sq = 0.0;
    for (std::size_t i = 0; i < cfg_.d; ++i) {
        const double diff = a[i] - state_.s[i];
        sq += diff * diff;
    }
    const double reward = -sq / static_cast<double>(cfg_.d);

    for (double& si : state_.s) {
        si = std::clamp(cfg_.decay * si + cfg_.process_noise * rng_.gaussian(), -1.0, 1.0);
    }
    ++state_.t;
    return {reward, state_.t == cfg_.horizon};
}

double optimal_return(const EnvConfig& cfg, std::uint64_t episode_seed) {
    ToyEnv env(cfg);
    env.reset(episode_seed);
    double total = 0.0;
    for (;;) {
        const std::vector<double> a = env.state().s;  // the optimal policy tracks the target
        const auto [reward, done] = env.step(a);
        total += reward;
        if (done) break;
    }
    return total;
}

double normalized_score(const EnvConfig& cfg, double episode_return, double optimal) {
    const double scale = 0.25 * static_cast<double>(cfg.horizon);
    return std::max(0.0, 1.0 + (episode_return - optimal) / scale);
}

}  // namespace tanhshift
