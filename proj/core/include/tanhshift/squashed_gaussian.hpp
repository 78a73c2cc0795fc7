#pragma once

#include <span>
#include <vector>

#include "tanhshift/random.hpp"

namespace tanhshift {

// artanh inputs are clamped to |y| <= 1 - kBoundaryClamp. Inputs with
// |y| >= 1 + kBoundaryTolerance are rejected as out of domain.
inline constexpr double kBoundaryClamp = 1e-12;
inline constexpr double kBoundaryTolerance = 1e-12;

/// Pre-squash Gaussian N(mu, sigma^2). sigma must be positive and finite,
/// mu finite; the constructor throws std::invalid_argument otherwise.
struct Gaussian1D {
    double mu;
    double sigma;

    Gaussian1D(double mu, double sigma);
};

/// Distribution of y = tanh(u) with u ~ N(mu, sigma^2).
/// Support is the open interval (-1, 1); the density is
///   p(y) = N(artanh(y); mu, sigma^2) / (1 - y^2).
struct SquashedGaussian1D {
    Gaussian1D base;

    explicit SquashedGaussian1D(Gaussian1D base) : base(base) {}
    SquashedGaussian1D(double mu, double sigma) : base(mu, sigma) {}
};

/// Diagonal product of independent per-dimension squashed Gaussians.
struct DiagSquashedGaussian {
    std::vector<double> mu;
    std::vector<double> sigma;

    // Throws std::invalid_argument on size mismatch, empty vectors, or an
    // invalid (mu, sigma) pair in any dimension.
    DiagSquashedGaussian(std::vector<double> mu, std::vector<double> sigma);

    std::size_t dims() const { return mu.size(); }
    SquashedGaussian1D dim(std::size_t i) const { return {mu[i], sigma[i]}; }
};

// Inverse tanh via 0.5*log1p-based form. Clamps |y| to 1 - kBoundaryClamp;
// throws std::domain_error when |y| >= 1 + kBoundaryTolerance.
double artanh(double y);

// Stable log(1 - tanh(u)^2) = 2*(log 2 - |u| - log1p(exp(-2|u|))).
double log1m_tanh_sq(double u);

// Density of the pre-squash Gaussian at u.
double base_pdf(const Gaussian1D& g, double u);

// Log density of y under the squashed distribution. Requires |y| < 1
// after boundary handling; throws std::domain_error outside the closed
// tolerance band.
double log_pdf(const SquashedGaussian1D& d, double y);

// Density at y, computed as exp(log_pdf) so the two ops never disagree.
double pdf(const SquashedGaussian1D& d, double y);

// P(Y <= y) = Phi((artanh(y) - mu) / sigma); tanh is monotone so the
// Gaussian CDF transfers directly.
double cdf(const SquashedGaussian1D& d, double y);

// Draws tanh(u) with u ~ N(mu, sigma^2).
double sample(const SquashedGaussian1D& d, Rng& rng);

// Log density of the squashed sample expressed through the pre-squash
// value u: log N(u; mu, sigma^2) - log(1 - tanh(u)^2), with the Jacobian
// term evaluated in log space so large |u| stays finite.
double action_log_prob(const SquashedGaussian1D& d, double u);

// Sum of per-dimension log densities; y.size() must equal d.dims().
double joint_log_pdf(const DiagSquashedGaussian& d, std::span<const double> y);

}  // namespace tanhshift
