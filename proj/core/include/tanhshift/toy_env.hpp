#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tanhshift/random.hpp"

namespace tanhshift {

/// Target-tracking environment on the action cube [-1, 1]^d. The state is
/// the target; the optimal action is a = s, worth reward 0 at that step.
/// Initial states are drawn with amplitude boundary_frac so large parts of
/// the target sit where |s| > tanh(1), the regime where squashing distorts
/// the action density most.
struct EnvConfig {
    std::size_t d = 8;
    int horizon = 10;
    double boundary_frac = 0.95;  // initial-state amplitude, in (0, 1)
    double decay = 0.9;           // in (0, 1)
    double process_noise = 0.02;  // >= 0
    std::uint64_t seed = 0;       // base seed; episode streams derive from it
};

// Throws std::invalid_argument when a field is out of range.
void validate(const EnvConfig& cfg);

struct EnvState {
    std::vector<double> s;  // components in [-1, 1]
    int t = 0;
};

class ToyEnv {
public:
    explicit ToyEnv(EnvConfig cfg);

    const EnvConfig& config() const { return cfg_; }
    const EnvState& state() const { return state_; }

    // Starts a fresh episode: s ~ Uniform([-b, b]^d) from the stream
    // derived from (cfg.seed, episode_seed); t = 0.
    const EnvState& reset(std::uint64_t episode_seed);

    struct StepResult {
        double reward;  // -(1/d)*||a - s||^2, always <= 0
        bool done;      // true when the episode reaches horizon
    };

    // Advances the internal state: next s = clamp(decay*s + noise*xi) with
    // xi standard normal from the episode stream. Throws
    // std::invalid_argument on dimension mismatch or |a_i| > 1.
    StepResult step(std::span<const double> a);

private:
    EnvConfig cfg_;
    EnvState state_;
    Rng rng_{0};
};

// Return of the a = s policy on the given episode.
double optimal_return(const EnvConfig& cfg, std::uint64_t episode_seed);

// Maps an episode return to [0, 1]: 1 + (ret - optimal)/(0.25*horizon),
// clamped at 0. The optimal return maps to 1 by construction.
double normalized_score(const EnvConfig& cfg, double episode_return, double optimal);

}  // namespace tanhshift
