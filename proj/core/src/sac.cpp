#include "tanhshift/sac.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tanhshift/mode_solver.hpp"
#include "tanhshift/squashed_gaussian.hpp"

namespace tanhshift {

namespace {

// Stream ids carved out of the run seed. Training consumption (explore,
// noise, replay, train env) never overlaps evaluation consumption, so the
// inference mode cannot perturb the training trajectory.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamExplore = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamReplay = 4;
constexpr std::uint64_t kStreamTrainEnv = 5;
constexpr std::uint64_t kStreamEvalEnv = 6;

constexpr double kHalfLog2Pi = 0.9189385332046727;

EnvConfig with_seed(EnvConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
}

}  // namespace

std::string_view inference_mode_token(InferenceMode mode) {
    return mode == InferenceMode::Standard ? "standard" : "corrected";
}

InferenceMode parse_inference_mode(std::string_view token) {
    if (token == "standard") return InferenceMode::Standard;
    if (token == "corrected") return InferenceMode::Corrected;
    throw std::invalid_argument("unknown inference mode: " + std::string(token));
}

void validate(const SacConfig& cfg) {
    if (!(cfg.actor_lr > 0.0 && cfg.critic_lr > 0.0 && cfg.temperature_lr > 0.0)) {
        throw std::invalid_argument("sac config: learning rates must be > 0");
    }
    if (!(cfg.polyak > 0.0 && cfg.polyak <= 1.0)) {
        throw std::invalid_argument("sac config: polyak must be in (0, 1]");
    }
    if (!(cfg.discount > 0.0 && cfg.discount < 1.0)) {
        throw std::invalid_argument("sac config: discount must be in (0, 1)");
    }
    if (cfg.batch_size < 1) throw std::invalid_argument("sac config: batch_size must be >= 1");
    if (cfg.start_steps < 0) throw std::invalid_argument("sac config: start_steps must be >= 0");
    if (cfg.max_steps < 0) throw std::invalid_argument("sac config: max_steps must be >= 0");
    if (cfg.eval_interval < 1) throw std::invalid_argument("sac config: eval_interval must be >= 1");
    if (cfg.eval_episodes < 1) throw std::invalid_argument("sac config: eval_episodes must be >= 1");
    if (cfg.replay_capacity < 1) throw std::invalid_argument("sac config: replay_capacity must be >= 1");
    if (cfg.seed_begin > cfg.seed_end) {
        throw std::invalid_argument("sac config: seed range must be non-empty");
    }
}

PolicyOutput policy_forward(const Mlp& actor, std::span<const double> s) {
    const std::size_t d = actor.output_dim() / 2;
    if (actor.output_dim() != 2 * d || d == 0) {
        throw std::invalid_argument("policy_forward: actor output width must be twice the action dim");
    }
    std::vector<double> raw(2 * d);
    actor.forward(s, raw);
    PolicyOutput out;
    out.mu.assign(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(d));
    out.sigma.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        out.sigma[i] = std::exp(std::clamp(raw[d + i], kLogSigmaMin, kLogSigmaMax));
    }
    return out;
}

SampledAction squash_from_noise(std::span<const double> mu, std::span<const double> sigma,
                                std::span<const double> eps) {
    if (mu.size() != sigma.size() || mu.size() != eps.size()) {
        throw std::invalid_argument("squash_from_noise: size mismatch");
    }
    SampledAction out;
    out.action.resize(mu.size());
    double logp = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double u = mu[i] + sigma[i] * eps[i];
        out.action[i] = std::tanh(u);
        logp += -std::log(sigma[i]) - kHalfLog2Pi - 0.5 * eps[i] * eps[i] - log1m_tanh_sq(u);
    }
    out.log_prob = logp;
    return out;
}

SampledAction sample_action_train(std::span<const double> mu, std::span<const double> sigma,
                                  Rng& rng) {
    std::vector<double> eps(mu.size());
    for (double& e : eps) e = rng.gaussian();
    return squash_from_noise(mu, sigma, eps);
}

std::vector<double> infer_standard(std::span<const double> mu) {
    std::vector<double> a(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) a[i] = std::tanh(mu[i]);
    return a;
}

std::vector<double> infer_corrected(std::span<const double> mu, std::span<const double> sigma,
                                    bool use_grid) {
    if (mu.size() != sigma.size()) throw std::invalid_argument("infer_corrected: size mismatch");
    std::vector<double> a(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const SquashedGaussian1D d(mu[i], sigma[i]);
        a[i] = use_grid ? grid_mode(d).y_star : analytic_mode(d).y_star;
    }
    return a;
}

SacAgent::SacAgent(std::size_t state_dim, std::size_t action_dim, SacConfig cfg,
                   std::uint64_t init_seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      cfg_(std::move(cfg)),
      target_entropy_(cfg_.target_entropy.value_or(-static_cast<double>(action_dim))),
      actor_(state_dim, cfg_.hidden_dims, 2 * action_dim),
      critic1_(state_dim + action_dim, cfg_.hidden_dims, 1),
      critic2_(state_dim + action_dim, cfg_.hidden_dims, 1),
      target1_(critic1_),
      target2_(critic2_),
      actor_opt_(actor_.param_count(), cfg_.actor_lr),
      critic1_opt_(critic1_.param_count(), cfg_.critic_lr),
      critic2_opt_(critic2_.param_count(), cfg_.critic_lr),
      alpha_opt_(1, cfg_.temperature_lr) {
    if (state_dim_ == 0 || action_dim_ == 0) {
        throw std::invalid_argument("sac agent: state and action dims must be >= 1");
    }
    validate(cfg_);

    Rng init_rng(init_seed);
    actor_.init_uniform(init_rng);
    critic1_.init_uniform(init_rng);
    critic2_.init_uniform(init_rng);
    std::copy(critic1_.params().begin(), critic1_.params().end(), target1_.params().begin());
    std::copy(critic2_.params().begin(), critic2_.params().end(), target2_.params().begin());

    ws_mu_.resize(action_dim_);
    ws_sigma_.resize(action_dim_);
    ws_raw_.resize(2 * action_dim_);
    ws_action_.resize(action_dim_);
    ws_u_.resize(action_dim_);
    ws_sa_.resize(state_dim_ + action_dim_);
    ws_dsa_.resize(state_dim_ + action_dim_);
    ws_dout_.resize(2 * action_dim_);
    grad_c1_.resize(critic1_.param_count());
    grad_c2_.resize(critic2_.param_count());
    grad_actor_.resize(actor_.param_count());
    scratch_grad1_.resize(critic1_.param_count());
    scratch_grad2_.resize(critic2_.param_count());
    targets_.resize(cfg_.batch_size);
    batch_ptrs_.reserve(cfg_.batch_size);
    next_eps_.assign(cfg_.batch_size, std::vector<double>(action_dim_, 0.0));
    actor_eps_.assign(cfg_.batch_size, std::vector<double>(action_dim_, 0.0));
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

void SacAgent::policy_into(std::span<const double> s, Mlp::Trace& trace, std::span<double> mu,
                           std::span<double> sigma, std::span<double> raw) const {
    actor_.forward(s, trace, raw);
    for (std::size_t i = 0; i < action_dim_; ++i) {
        mu[i] = raw[i];
        sigma[i] = std::exp(std::clamp(raw[action_dim_ + i], kLogSigmaMin, kLogSigmaMax));
    }
}

double SacAgent::squash_into(std::span<const double> mu, std::span<const double> sigma,
                             std::span<const double> eps, std::span<double> action,
                             std::span<double> u_out) const {
    double logp = 0.0;
    for (std::size_t i = 0; i < action_dim_; ++i) {
        const double u = mu[i] + sigma[i] * eps[i];
        u_out[i] = u;
        action[i] = std::tanh(u);
        logp += -std::log(sigma[i]) - kHalfLog2Pi - 0.5 * eps[i] * eps[i] - log1m_tanh_sq(u);
    }
    return logp;
}

PolicyOutput SacAgent::policy(std::span<const double> s) const { return policy_forward(actor_, s); }

SampledAction SacAgent::act_train(std::span<const double> s, Rng& rng) const {
    const PolicyOutput po = policy(s);
    return sample_action_train(po.mu, po.sigma, rng);
}

std::vector<double> SacAgent::act_greedy(std::span<const double> s) const {
    const PolicyOutput po = policy(s);
    if (cfg_.inference_mode == InferenceMode::Standard) return infer_standard(po.mu);
    return infer_corrected(po.mu, po.sigma, cfg_.grid_inference);
}

void SacAgent::compute_targets(Batch batch, const NoiseMatrix& next_eps,
                               std::span<double> y) const {
    const double alpha_now = alpha();
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& tr = *batch[i];
        policy_into(tr.s_next, trace_a_, ws_mu_, ws_sigma_, ws_raw_);
        const double logp = squash_into(ws_mu_, ws_sigma_, next_eps[i], ws_action_, ws_u_);

        std::copy(tr.s_next.begin(), tr.s_next.end(), ws_sa_.begin());
        std::copy(ws_action_.begin(), ws_action_.end(),
                  ws_sa_.begin() + static_cast<std::ptrdiff_t>(state_dim_));
        double q1 = 0.0, q2 = 0.0;
        target1_.forward(ws_sa_, trace_b_, std::span<double>(&q1, 1));
        target2_.forward(ws_sa_, trace_b_, std::span<double>(&q2, 1));

        const double q_min = std::min(q1, q2);
        const double mask = tr.done ? 0.0 : 1.0;
        y[i] = tr.r + cfg_.discount * mask * (q_min - alpha_now * logp);
    }
}

std::pair<double, double> SacAgent::critic_pass(Batch batch, const NoiseMatrix& next_eps,
                                                std::span<double> grad1,
                                                std::span<double> grad2) const {
    const std::size_t b = batch.size();
    if (b == 0) throw std::invalid_argument("sac update: empty batch");
    if (next_eps.size() < b) throw std::invalid_argument("sac update: noise matrix too small");
    targets_.resize(b);
    std::span<double> y(targets_);
    compute_targets(batch, next_eps, y);

    if (!grad1.empty()) std::fill(grad1.begin(), grad1.end(), 0.0);
    if (!grad2.empty()) std::fill(grad2.begin(), grad2.end(), 0.0);

    const double inv_b = 1.0 / static_cast<double>(b);
    double loss1 = 0.0, loss2 = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const Transition& tr = *batch[i];
        std::copy(tr.s.begin(), tr.s.end(), ws_sa_.begin());
        std::copy(tr.a.begin(), tr.a.end(),
                  ws_sa_.begin() + static_cast<std::ptrdiff_t>(state_dim_));

        double q1 = 0.0, q2 = 0.0;
        critic1_.forward(ws_sa_, trace_b_, std::span<double>(&q1, 1));
        critic2_.forward(ws_sa_, trace_c_, std::span<double>(&q2, 1));
        const double e1 = q1 - y[i];
        const double e2 = q2 - y[i];
        loss1 += e1 * e1 * inv_b;
        loss2 += e2 * e2 * inv_b;

        if (!grad1.empty()) {
            const double d1 = 2.0 * e1 * inv_b;
            critic1_.backward(trace_b_, std::span<const double>(&d1, 1), grad1);
        }
        if (!grad2.empty()) {
            const double d2 = 2.0 * e2 * inv_b;
            critic2_.backward(trace_c_, std::span<const double>(&d2, 1), grad2);
        }
    }
    return {loss1, loss2};
}

std::pair<double, double> SacAgent::critic_losses(Batch batch, const NoiseMatrix& next_eps) const {
    return critic_pass(batch, next_eps, {}, {});
}

std::pair<double, double> SacAgent::critic_gradients(Batch batch, const NoiseMatrix& next_eps,
                                                     std::span<double> grad1,
                                                     std::span<double> grad2) const {
    if (grad1.size() != critic1_.param_count() || grad2.size() != critic2_.param_count()) {
        throw std::invalid_argument("critic_gradients: gradient size mismatch");
    }
    return critic_pass(batch, next_eps, grad1, grad2);
}

SacAgent::ActorPass SacAgent::actor_pass(Batch batch, const NoiseMatrix& eps,
                                         std::span<double> grad) const {
    const std::size_t b = batch.size();
    if (b == 0) throw std::invalid_argument("sac update: empty batch");
    if (eps.size() < b) throw std::invalid_argument("sac update: noise matrix too small");
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);

    const double alpha_now = alpha();
    const double inv_b = 1.0 / static_cast<double>(b);
    double loss = 0.0;
    double sum_logp = 0.0;

    for (std::size_t i = 0; i < b; ++i) {
        const Transition& tr = *batch[i];
        policy_into(tr.s, trace_a_, ws_mu_, ws_sigma_, ws_raw_);
        const double logp = squash_into(ws_mu_, ws_sigma_, eps[i], ws_action_, ws_u_);
        sum_logp += logp;

        std::copy(tr.s.begin(), tr.s.end(), ws_sa_.begin());
        std::copy(ws_action_.begin(), ws_action_.end(),
                  ws_sa_.begin() + static_cast<std::ptrdiff_t>(state_dim_));
        double q1 = 0.0, q2 = 0.0;
        critic1_.forward(ws_sa_, trace_b_, std::span<double>(&q1, 1));
        critic2_.forward(ws_sa_, trace_c_, std::span<double>(&q2, 1));
        const double q_min = std::min(q1, q2);
        loss += (alpha_now * logp - q_min) * inv_b;

        if (grad.empty()) continue;

        // dL/da through the minimizing critic only; its parameter grads
        // land in a scratch buffer and are discarded.
        std::fill(ws_dsa_.begin(), ws_dsa_.end(), 0.0);
        const double d_q = -inv_b;
        if (q1 <= q2) {
            critic1_.backward(trace_b_, std::span<const double>(&d_q, 1), scratch_grad1_, ws_dsa_);
        } else {
            critic2_.backward(trace_c_, std::span<const double>(&d_q, 1), scratch_grad2_, ws_dsa_);
        }

        for (std::size_t k = 0; k < action_dim_; ++k) {
            const double a = ws_action_[k];
            const double one_minus_a2 = 1.0 - a * a;
            const double d_a = ws_dsa_[state_dim_ + k];
            const double d_mu = d_a * one_minus_a2 + alpha_now * inv_b * 2.0 * a;
            double d_sigma = d_a * one_minus_a2 * eps[i][k] +
                             alpha_now * inv_b * (2.0 * a * eps[i][k] - 1.0 / ws_sigma_[k]);
            const double raw = ws_raw_[action_dim_ + k];
            const bool pass = raw > kLogSigmaMin && raw < kLogSigmaMax;
            ws_dout_[k] = d_mu;
            ws_dout_[action_dim_ + k] = pass ? d_sigma * ws_sigma_[k] : 0.0;
        }
        actor_.backward(trace_a_, ws_dout_, grad);
    }
    return {loss, sum_logp * inv_b};
}

double SacAgent::actor_loss(Batch batch, const NoiseMatrix& eps) const {
    return actor_pass(batch, eps, {}).loss;
}

double SacAgent::actor_gradients(Batch batch, const NoiseMatrix& eps,
                                 std::span<double> grad) const {
    if (grad.size() != actor_.param_count()) {
        throw std::invalid_argument("actor_gradients: gradient size mismatch");
    }
    return actor_pass(batch, eps, grad).loss;
}

double SacAgent::temperature_loss(Batch batch, const NoiseMatrix& eps) const {
    const ActorPass pass = actor_pass(batch, eps, {});
    return -alpha() * (pass.mean_log_prob + target_entropy_);
}

double SacAgent::temperature_gradient(Batch batch, const NoiseMatrix& eps) const {
    // J(log alpha) = -exp(log alpha)*(mean logpi + target); the derivative
    // in log alpha equals J itself.
    return temperature_loss(batch, eps);
}

LossReport SacAgent::update(const ReplayBuffer& buffer, Rng& replay_rng, Rng& noise_rng) {
    const std::size_t b = cfg_.batch_size;
    if (buffer.size() < b) {
        throw std::logic_error("sac update: replay holds fewer transitions than batch_size");
    }

    batch_ptrs_.clear();
    for (std::size_t i = 0; i < b; ++i) batch_ptrs_.push_back(&buffer.at(buffer.sample_index(replay_rng)));
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t k = 0; k < action_dim_; ++k) next_eps_[i][k] = noise_rng.gaussian();
    }
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t k = 0; k < action_dim_; ++k) actor_eps_[i][k] = noise_rng.gaussian();
    }

    const Batch batch(batch_ptrs_.data(), b);
    const auto [loss1, loss2] = critic_pass(batch, next_eps_, grad_c1_, grad_c2_);
    critic1_opt_.step(critic1_.params(), grad_c1_);
    critic2_opt_.step(critic2_.params(), grad_c2_);

    const ActorPass actor = actor_pass(batch, actor_eps_, grad_actor_);
    actor_opt_.step(actor_.params(), grad_actor_);

    const double alpha_used = alpha();
    const double t_loss = -alpha_used * (actor.mean_log_prob + target_entropy_);
    const double t_grad = t_loss;
    alpha_opt_.step(std::span<double>(&log_alpha_, 1), std::span<const double>(&t_grad, 1));

    polyak_blend(cfg_.polyak);

    if (!std::isfinite(loss1) || !std::isfinite(loss2) || !std::isfinite(actor.loss) ||
        !std::isfinite(t_loss)) {
        throw std::runtime_error(
            "sac update: non-finite loss (critic1=" + std::to_string(loss1) +
            " critic2=" + std::to_string(loss2) + " actor=" + std::to_string(actor.loss) +
            " temperature=" + std::to_string(t_loss) + ")");
    }

    return {loss1, loss2, actor.loss, t_loss, alpha_used, -actor.mean_log_prob};
}

void SacAgent::polyak_blend(double tau) {
    const auto blend = [tau](Mlp& target, const Mlp& online) {
        auto t = target.params();
        auto o = online.params();
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
    };
    blend(target1_, critic1_);
    blend(target2_, critic2_);
}

Trainer::Trainer(EnvConfig env_cfg, SacConfig sac_cfg, std::uint64_t seed)
    : env_cfg_(env_cfg),
      sac_cfg_(sac_cfg),
      seed_(seed),
      agent_(env_cfg.d, env_cfg.d, sac_cfg, derive_stream(seed, kStreamInit)),
      replay_(sac_cfg.replay_capacity),
      env_(with_seed(env_cfg, derive_stream(seed, kStreamTrainEnv))),
      eval_env_(with_seed(env_cfg, derive_stream(seed, kStreamEvalEnv))),
      explore_rng_(derive_stream(seed, kStreamExplore)),
      noise_rng_(derive_stream(seed, kStreamNoise)),
      replay_rng_(derive_stream(seed, kStreamReplay)) {}

Checkpoint Trainer::evaluate(long env_steps, std::size_t checkpoint_index) {
    Checkpoint cp;
    cp.env_steps = env_steps;
    const bool corrected = sac_cfg_.inference_mode == InferenceMode::Corrected;

    for (std::size_t ep = 0; ep < sac_cfg_.eval_episodes; ++ep) {
        const std::uint64_t episode_seed =
            (static_cast<std::uint64_t>(checkpoint_index) << 20) | static_cast<std::uint64_t>(ep);
        eval_env_.reset(episode_seed);
        double episode_return = 0.0;
        for (;;) {
            const PolicyOutput po = agent_.policy(eval_env_.state().s);
            std::vector<double> a = corrected
                                        ? infer_corrected(po.mu, po.sigma, sac_cfg_.grid_inference)
                                        : infer_standard(po.mu);
            // The argmax guarantee holds for the analytic solver only; the
            // grid variant can lose to an off-grid tanh(mu) by up to one step.
            if (corrected && !sac_cfg_.grid_inference) {
                for (std::size_t k = 0; k < a.size(); ++k) {
                    const SquashedGaussian1D dist(po.mu[k], po.sigma[k]);
                    const double corrected_lp = log_pdf(dist, a[k]);
                    const double naive_lp = log_pdf(dist, std::tanh(po.mu[k]));
                    // The margin shrinks like mu^2 near mu = 0, below what two
                    // rounded log_pdf evaluations can resolve, so equality gets
                    // a small absolute-plus-relative band.
                    const double tol = 1e-9 * std::max(1.0, std::fabs(naive_lp));
                    if (corrected_lp < naive_lp - tol) {
                        ++stats_.dominance_violations;
                        assert(false && "corrected action density fell below the naive action");
                    }
                }
            }
            const auto [reward, done] = eval_env_.step(a);
            episode_return += reward;
            if (done) break;
        }
        const double opt = optimal_return(eval_env_.config(), episode_seed);
        cp.scores.push_back(episode_return);
        cp.normalized.push_back(normalized_score(eval_env_.config(), episode_return, opt));
    }
    return cp;
}

RunRecord Trainer::run() {
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord record;
    record.seed = seed_;
    record.env_config = env_cfg_;
    record.sac_config = sac_cfg_;
    record.sac_config.target_entropy = agent_.target_entropy();

    std::uint64_t episode_counter = 0;
    env_.reset(episode_counter++);
    std::size_t checkpoint_index = 0;

    for (long step = 1; step <= sac_cfg_.max_steps; ++step) {
        Transition tr;
        tr.s = env_.state().s;
        if (step <= sac_cfg_.start_steps) {
            tr.a.resize(env_cfg_.d);
            for (double& ai : tr.a) ai = explore_rng_.uniform(-1.0, 1.0);
        } else {
            tr.a = agent_.act_train(env_.state().s, explore_rng_).action;
        }
        const auto [reward, done] = env_.step(tr.a);
        tr.r = reward;
        tr.s_next = env_.state().s;
        tr.done = done;
        replay_.push(std::move(tr));
        if (done) env_.reset(episode_counter++);

        if (step > sac_cfg_.start_steps && replay_.size() >= sac_cfg_.batch_size) {
            agent_.update(replay_, replay_rng_, noise_rng_);
        }
        if (step % sac_cfg_.eval_interval == 0) {
            record.checkpoints.push_back(evaluate(step, checkpoint_index++));
        }
    }

    stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

RunRecord train(const EnvConfig& env_cfg, const SacConfig& sac_cfg, std::uint64_t seed,
                TrainStats* stats) {
    Trainer trainer(env_cfg, sac_cfg, seed);
    RunRecord record = trainer.run();
    if (stats != nullptr) *stats = trainer.stats();
    return record;
}

}  // namespace tanhshift
