#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tanhshift/mlp.hpp"
#include "tanhshift/replay_buffer.hpp"
#include "tanhshift/toy_env.hpp"

namespace tanhshift {

enum class InferenceMode { Standard, Corrected };

std::string_view inference_mode_token(InferenceMode mode);
InferenceMode parse_inference_mode(std::string_view token);

struct SacConfig {
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double temperature_lr = 3e-4;
    double discount = 0.99;
    double polyak = 0.005;
    std::size_t batch_size = 64;
    long start_steps = 1000;
    long max_steps = 50000;
    long eval_interval = 2500;
    std::size_t eval_episodes = 10;
    std::vector<std::size_t> hidden_dims{64, 64};
    std::optional<double> target_entropy;  // resolved to -action_dim when unset
    std::size_t replay_capacity = 100000;
    std::uint64_t seed_begin = 0;  // inclusive seed range for multi-run drivers
    std::uint64_t seed_end = 4;
    InferenceMode inference_mode = InferenceMode::Standard;
    bool grid_inference = false;  // corrected inference uses the grid scan instead of the solver
};

// Throws std::invalid_argument when a field is out of range.
void validate(const SacConfig& cfg);

// Actor head clamp: raw log-sigma outputs are limited to this range before
// exponentiation, so sigma stays in [e^-5, e^2]. The clamp passes gradients
// through only strictly inside the range.
inline constexpr double kLogSigmaMin = -5.0;
inline constexpr double kLogSigmaMax = 2.0;

struct PolicyOutput {
    std::vector<double> mu;
    std::vector<double> sigma;
};

// Splits an actor network's output (first half mu, second half raw
// log-sigma) and applies the clamp. The network's output width must be
// twice the action dimension.
PolicyOutput policy_forward(const Mlp& actor, std::span<const double> s);

struct SampledAction {
    std::vector<double> action;  // componentwise in (-1, 1)
    double log_prob;
};

// Deterministic reparameterized squash: a = tanh(mu + sigma*eps) with the
// summed per-dimension log density of a.
SampledAction squash_from_noise(std::span<const double> mu, std::span<const double> sigma,
                                std::span<const double> eps);

// squash_from_noise with eps drawn standard normal from rng.
SampledAction sample_action_train(std::span<const double> mu, std::span<const double> sigma,
                                  Rng& rng);

// a = tanh(mu) elementwise.
std::vector<double> infer_standard(std::span<const double> mu);

// Per-dimension mode of the squashed action distribution; use_grid swaps
// the analytic solver for the fixed-grid scan.
std::vector<double> infer_corrected(std::span<const double> mu, std::span<const double> sigma,
                                    bool use_grid = false);

struct LossReport {
    double critic1;
    double critic2;
    double actor;
    double temperature;
    double alpha;    // temperature value used by this update
    double entropy;  // -mean log-prob of the fresh actor samples
};

struct Checkpoint {
    long env_steps;
    std::vector<double> scores;
    std::vector<double> normalized;
};

struct RunRecord {
    std::uint64_t seed;
    EnvConfig env_config;
    SacConfig sac_config;
    std::vector<Checkpoint> checkpoints;
};

/// Twin-critic SAC with automatic temperature. Critic inputs are the
/// state followed by the action. All randomness is injected: updates take
/// the replay and noise streams as arguments, so a fixed seed fixes the
/// whole parameter trajectory.
class SacAgent {
public:
    using Batch = std::span<const Transition* const>;
    using NoiseMatrix = std::vector<std::vector<double>>;  // [batch][action_dim]

    SacAgent(std::size_t state_dim, std::size_t action_dim, SacConfig cfg,
             std::uint64_t init_seed);

    const SacConfig& config() const { return cfg_; }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t action_dim() const { return action_dim_; }
    double target_entropy() const { return target_entropy_; }

    PolicyOutput policy(std::span<const double> s) const;
    SampledAction act_train(std::span<const double> s, Rng& rng) const;

    // The configured inference operation with no sampling noise.
    std::vector<double> act_greedy(std::span<const double> s) const;

    // One SAC step: critic regression to the twin-target Bellman value,
    // actor step on E[alpha*logpi - min Q], temperature step toward the
    // entropy target, then a polyak blend of the target critics. Throws
    // std::runtime_error when any loss turns non-finite.
    LossReport update(const ReplayBuffer& buffer, Rng& replay_rng, Rng& noise_rng);

    // target <- (1-tau)*target + tau*online, both critics.
    void polyak_blend(double tau);

    double alpha() const;
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }

    Mlp& actor() { return actor_; }
    const Mlp& actor() const { return actor_; }
    Mlp& critic1() { return critic1_; }
    const Mlp& critic1() const { return critic1_; }
    Mlp& critic2() { return critic2_; }
    const Mlp& critic2() const { return critic2_; }
    Mlp& target_critic1() { return target1_; }
    const Mlp& target_critic1() const { return target1_; }
    Mlp& target_critic2() { return target2_; }
    const Mlp& target_critic2() const { return target2_; }

    // Fixed-noise loss surfaces and their analytic gradients. The noise
    // matrices play the role of the reparameterization draws, so the same
    // batch and noise give a deterministic scalar that finite differences
    // can probe. next_eps drives the target actions, eps the actor samples.
    std::pair<double, double> critic_losses(Batch batch, const NoiseMatrix& next_eps) const;
    std::pair<double, double> critic_gradients(Batch batch, const NoiseMatrix& next_eps,
                                               std::span<double> grad1,
                                               std::span<double> grad2) const;
    double actor_loss(Batch batch, const NoiseMatrix& eps) const;
    double actor_gradients(Batch batch, const NoiseMatrix& eps, std::span<double> grad) const;
    double temperature_loss(Batch batch, const NoiseMatrix& eps) const;
    double temperature_gradient(Batch batch, const NoiseMatrix& eps) const;

private:
    struct ActorPass {
        double loss;
        double mean_log_prob;
    };

    void policy_into(std::span<const double> s, Mlp::Trace& trace, std::span<double> mu,
                     std::span<double> sigma, std::span<double> raw) const;
    double squash_into(std::span<const double> mu, std::span<const double> sigma,
                       std::span<const double> eps, std::span<double> action,
                       std::span<double> u_out) const;
    void compute_targets(Batch batch, const NoiseMatrix& next_eps, std::span<double> y) const;
    std::pair<double, double> critic_pass(Batch batch, const NoiseMatrix& next_eps,
                                          std::span<double> grad1, std::span<double> grad2) const;
    ActorPass actor_pass(Batch batch, const NoiseMatrix& eps, std::span<double> grad) const;

    std::size_t state_dim_;
    std::size_t action_dim_;
    SacConfig cfg_;
    double target_entropy_;

    Mlp actor_;
    Mlp critic1_;
    Mlp critic2_;
    Mlp target1_;
    Mlp target2_;
    double log_alpha_ = 0.0;

    AdamOptimizer actor_opt_;
    AdamOptimizer critic1_opt_;
    AdamOptimizer critic2_opt_;
    AdamOptimizer alpha_opt_;

    // Reused workspaces; SacAgent is not safe for concurrent calls.
    mutable Mlp::Trace trace_a_, trace_b_, trace_c_;
    mutable std::vector<double> ws_mu_, ws_sigma_, ws_raw_, ws_action_, ws_u_, ws_sa_, ws_dsa_,
        ws_dout_;
    mutable std::vector<double> targets_, scratch_grad1_, scratch_grad2_;
    std::vector<double> grad_c1_, grad_c2_, grad_actor_;
    std::vector<const Transition*> batch_ptrs_;
    NoiseMatrix next_eps_, actor_eps_;
};

struct TrainStats {
    long long dominance_violations = 0;  // corrected-inference density checks that failed
    double seconds = 0.0;
};

/// Owns one seeded training run end to end; kept as an object so tests can
/// inspect the replay buffer and agent after running.
class Trainer {
public:
    Trainer(EnvConfig env_cfg, SacConfig sac_cfg, std::uint64_t seed);

    RunRecord run();

    const SacAgent& agent() const { return agent_; }
    const ReplayBuffer& replay() const { return replay_; }
    const TrainStats& stats() const { return stats_; }

private:
    Checkpoint evaluate(long env_steps, std::size_t checkpoint_index);

    EnvConfig env_cfg_;
    SacConfig sac_cfg_;
    std::uint64_t seed_;
    SacAgent agent_;
    ReplayBuffer replay_;
    ToyEnv env_;
    ToyEnv eval_env_;
    Rng explore_rng_;
    Rng noise_rng_;
    Rng replay_rng_;
    TrainStats stats_;
};

// Convenience wrapper around Trainer::run.
RunRecord train(const EnvConfig& env_cfg, const SacConfig& sac_cfg, std::uint64_t seed,
                TrainStats* stats = nullptr);

}  // namespace tanhshift
