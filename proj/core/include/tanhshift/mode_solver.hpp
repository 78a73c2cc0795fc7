#pragma once

#include <cstddef>
#include <vector>

#include "tanhshift/squashed_gaussian.hpp"

namespace tanhshift {

enum class ModeMethod { GridScan, Analytic };
enum class StationaryKind { LocalMax, LocalMin };

/// Location of a density maximum of a squashed Gaussian, in both action
/// space (y_star) and pre-squash space (t_star = artanh(y_star)).
struct ModeResult {
    double y_star;
    double t_star;
    double density_at_mode;
    ModeMethod method;
    std::size_t evaluations;
};

struct StationaryPoint {
    double t;
    double y;
    double density;
    StationaryKind kind;
};

/// All stationary points of the transformed density, the global mode,
/// and whether the density has two separate peaks.
struct ModeSet {
    std::vector<StationaryPoint> stationary_points;
    ModeResult global;
    bool bimodal;
};

// Scans p(y) over the fixed grid y_i = -0.999 + 0.0004*i, i = 0..4995,
// and returns the argmax; ties resolve to the smallest index. The grid
// stops at 0.999 so every evaluated point stays inside the support.
ModeResult grid_mode(const SquashedGaussian1D& d);

// Solves the stationarity condition t = mu + 2*sigma^2*tanh(t) for all
// real roots and classifies each by the second derivative of the
// transformed log-density. When 2*sigma^2 <= 1 the root is unique;
// otherwise the roots are isolated on the three monotone segments of
// g(t) = t - mu - 2*sigma^2*tanh(t). Ties between equal-density maxima
// resolve to the positive side. Throws std::runtime_error if the root
// finder fails to converge within 200 iterations.
ModeSet stationary_points(const SquashedGaussian1D& d);

// Global mode from stationary_points, tagged Analytic. |y_star| < 1.
ModeResult analytic_mode(const SquashedGaussian1D& d);

// The uncorrected action tanh(mu).
double naive_action(const SquashedGaussian1D& d);

// |analytic_mode.y_star - tanh(mu)|.
double action_bias(const SquashedGaussian1D& d);

}  // namespace tanhshift
