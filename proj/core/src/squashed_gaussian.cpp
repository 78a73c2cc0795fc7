#include "tanhshift/squashed_gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tanhshift {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

void check_finite_params(double mu, double sigma) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma <= 0.0) {
        throw std::invalid_argument("gaussian parameters require finite mu and sigma > 0, got mu=" +
                                    std::to_string(mu) + " sigma=" + std::to_string(sigma));
    }
}

// Clamp into the open support; reject points clearly outside it.
double clamp_to_support(double y) {
    if (!std::isfinite(y) || std::fabs(y) >= 1.0 + kBoundaryTolerance) {
        throw std::domain_error("value outside tanh support: y=" + std::to_string(y));
    }
    const double limit = 1.0 - kBoundaryClamp;
    if (y > limit) return limit;
    if (y < -limit) return -limit;
    return y;
}

}  // namespace

Gaussian1D::Gaussian1D(double mu, double sigma) : mu(mu), sigma(sigma) {
    check_finite_params(mu, sigma);
}

DiagSquashedGaussian::DiagSquashedGaussian(std::vector<double> mu_in, std::vector<double> sigma_in)
    : mu(std::move(mu_in)), sigma(std::move(sigma_in)) {
    if (mu.empty() || mu.size() != sigma.size()) {
        throw std::invalid_argument("diagonal distribution requires matching non-empty mu and sigma");
    }
    for (std::size_t i = 0; i < mu.size(); ++i) check_finite_params(mu[i], sigma[i]);
}

double artanh(double y) {
    const double c = clamp_to_support(y);
    return 0.5 * (std::log1p(c) - std::log1p(-c));
}

double log1m_tanh_sq(double u) {
    const double a = std::fabs(u);
    return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

double base_pdf(const Gaussian1D& g, double u) {
    const double z = (u - g.mu) / g.sigma;
    return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double log_pdf(const SquashedGaussian1D& d, double y) {
    const double c = clamp_to_support(y);
    const double u = 0.5 * (std::log1p(c) - std::log1p(-c));
    const double z = (u - d.base.mu) / d.base.sigma;
    // log(1 - y^2) split into log1p terms so values near the boundary
    // keep full precision.
    const double log_jacobian = std::log1p(-c) + std::log1p(c);
    return -0.5 * z * z - std::log(d.base.sigma) - kHalfLog2Pi - log_jacobian;
}

double pdf(const SquashedGaussian1D& d, double y) { return std::exp(log_pdf(d, y)); }

double cdf(const SquashedGaussian1D& d, double y) {
    const double z = (artanh(y) - d.base.mu) / d.base.sigma;
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double sample(const SquashedGaussian1D& d, Rng& rng) {
    return std::tanh(rng.gaussian(d.base.mu, d.base.sigma));
}

double action_log_prob(const SquashedGaussian1D& d, double u) {
    if (!std::isfinite(u)) throw std::domain_error("pre-squash value must be finite");
    const double z = (u - d.base.mu) / d.base.sigma;
    return -0.5 * z * z - std::log(d.base.sigma) - kHalfLog2Pi - log1m_tanh_sq(u);
}

double joint_log_pdf(const DiagSquashedGaussian& d, std::span<const double> y) {
    if (y.size() != d.dims()) {
        throw std::invalid_argument("joint_log_pdf dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += log_pdf(d.dim(i), y[i]);
    return total;
}

}  // namespace tanhshift
