#include "tanhshift/mode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tanhshift {

namespace {

constexpr double kRootTolerance = 1e-12;
constexpr int kMaxRootIterations = 200;

double g_of_t(double t, double mu, double two_sigma_sq) {
    return t - mu - two_sigma_sq * std::tanh(t);
}

double g_prime(double t, double two_sigma_sq) {
    const double c = std::cosh(t);
    return 1.0 - two_sigma_sq / (c * c);
}

// Newton iteration safeguarded by a sign-preserving bracket. The bracket
// endpoints must have opposite g signs; orientation (increasing or
// decreasing segment) is handled by tracking which end is negative.
double solve_root(double lo, double hi, double mu, double two_sigma_sq, std::size_t& evals) {
    double g_lo = g_of_t(lo, mu, two_sigma_sq);
    double g_hi = g_of_t(hi, mu, two_sigma_sq);
    evals += 2;
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if ((g_lo < 0.0) == (g_hi < 0.0)) {
        throw std::runtime_error("mode solver: bracket endpoints do not straddle a root");
    }

    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < kMaxRootIterations; ++iter) {
        const double g = g_of_t(t, mu, two_sigma_sq);
        ++evals;
        if (g == 0.0) return t;
        if ((g < 0.0) == (g_lo < 0.0)) {
            lo = t;
            g_lo = g;
        } else {
            hi = t;
            g_hi = g;
        }
        if (std::fabs(hi - lo) <= kRootTolerance * (1.0 + std::fabs(t))) {
            return 0.5 * (lo + hi);
        }
        const double dg = g_prime(t, two_sigma_sq);
        double next = t - g / dg;
        const bool inside = std::isfinite(next) && next > std::min(lo, hi) && next < std::max(lo, hi);
        if (!inside) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) <= kRootTolerance * (1.0 + std::fabs(next))) {
            return next;
        }
        t = next;
    }
    throw std::runtime_error("mode solver: no convergence within iteration limit");
}

// Second derivative of the transformed log-density in pre-squash space:
// L''(t) = 2*sech(t)^2 - 1/sigma^2.
double log_density_second_derivative(double t, double sigma) {
    const double c = std::cosh(t);
    return 2.0 / (c * c) - 1.0 / (sigma * sigma);
}

StationaryKind classify(const SquashedGaussian1D& d, double t) {
    const double curvature = log_density_second_derivative(t, d.base.sigma);
    if (std::fabs(curvature) >= 1e-10) {
        return curvature < 0.0 ? StationaryKind::LocalMax : StationaryKind::LocalMin;
    }
    // Degenerate curvature (merged roots): fall back to comparing nearby
    // densities through action_log_prob, which is smooth in t.
    const double here = action_log_prob(d, t);
    const double left = action_log_prob(d, t - 1e-4);
    const double right = action_log_prob(d, t + 1e-4);
    return (here >= left && here >= right) ? StationaryKind::LocalMax : StationaryKind::LocalMin;
}

StationaryPoint make_point(const SquashedGaussian1D& d, double t) {
    // tanh saturates to +-1.0 past |t| ~ 19; cap y inside the open support
    // at the same point the density evaluators clamp to.
    constexpr double cap = 1.0 - kBoundaryClamp;
    const double y = std::clamp(std::tanh(t), -cap, cap);
    return {t, y, pdf(d, y), classify(d, t)};
}

}  // namespace

ModeResult grid_mode(const SquashedGaussian1D& d) {
    constexpr double y0 = -0.999;
    constexpr double step = 0.0004;
    constexpr std::size_t last_index = 4995;  // keeps every grid point at or below 0.999

    double best_log = -std::numeric_limits<double>::infinity();
    double best_y = y0;
    for (std::size_t i = 0; i <= last_index; ++i) {
        const double y = y0 + step * static_cast<double>(i);
        const double lp = log_pdf(d, y);
        if (lp > best_log) {
            best_log = lp;
            best_y = y;
        }
    }
    return {best_y, artanh(best_y), std::exp(best_log), ModeMethod::GridScan, last_index + 1};
}

ModeSet stationary_points(const SquashedGaussian1D& d) {
    const double mu = d.base.mu;
    const double sigma = d.base.sigma;
    const double two_sigma_sq = 2.0 * sigma * sigma;

    std::vector<StationaryPoint> points;
    std::size_t evals = 0;

    if (two_sigma_sq <= 1.0) {
        // g is nondecreasing, so the root is unique.
        if (mu == 0.0) {
            points.push_back(make_point(d, 0.0));
        } else {
            const double span = std::fabs(mu) + two_sigma_sq + 1.0;
            points.push_back(make_point(d, solve_root(-span, span, mu, two_sigma_sq, evals)));
        }
    } else if (mu == 0.0) {
        // Symmetric case: roots are -t*, 0, +t*. Solving only the positive
        // root and mirroring keeps the pair exactly symmetric.
        const double t_c = std::acosh(std::sqrt(two_sigma_sq));
        const double t_pos = solve_root(t_c, two_sigma_sq + 1.0, 0.0, two_sigma_sq, evals);
        points.push_back(make_point(d, -t_pos));
        points.push_back(make_point(d, 0.0));
        points.push_back(make_point(d, t_pos));
    } else {
        // Three monotone segments split at +-t_c where g'(t_c) = 0; each
        // holds at most one root.
        const double t_c = std::acosh(std::sqrt(two_sigma_sq));
        const double span = std::fabs(mu) + two_sigma_sq + 1.0;
        const double g_left = g_of_t(-t_c, mu, two_sigma_sq);
        const double g_right = g_of_t(t_c, mu, two_sigma_sq);

        if (g_left >= 0.0) {
            points.push_back(make_point(d, g_left == 0.0 ? -t_c : solve_root(-span, -t_c, mu, two_sigma_sq, evals)));
        }
        if (g_left > 0.0 && g_right < 0.0) {
            points.push_back(make_point(d, solve_root(-t_c, t_c, mu, two_sigma_sq, evals)));
        }
        if (g_right <= 0.0) {
            points.push_back(make_point(d, g_right == 0.0 ? t_c : solve_root(t_c, span, mu, two_sigma_sq, evals)));
        }
    }

    std::size_t n_max = 0;
    const StationaryPoint* best = nullptr;
    for (const auto& p : points) {
        if (p.kind != StationaryKind::LocalMax) continue;
        ++n_max;
        if (best == nullptr || p.density > best->density ||
            (p.density == best->density && p.y > best->y)) {
            best = &p;
        }
    }
    if (best == nullptr) {
        throw std::runtime_error("mode solver: no local maximum found");
    }

    ModeSet set;
    set.stationary_points = points;
    set.global = {best->y, best->t, best->density, ModeMethod::Analytic, evals};
    set.bimodal = n_max == 2;
    return set;
}

ModeResult analytic_mode(const SquashedGaussian1D& d) { return stationary_points(d).global; }

double naive_action(const SquashedGaussian1D& d) { return std::tanh(d.base.mu); }

double action_bias(const SquashedGaussian1D& d) {
    return std::fabs(analytic_mode(d).y_star - naive_action(d));
}

}  // namespace tanhshift
