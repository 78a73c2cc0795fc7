#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tanhshift/squashed_gaussian.hpp"

namespace tanhshift {

/// Per-dimension gap |y*_i - tanh(mu_i)| between the corrected and naive
/// actions, with L1/L2/Linf aggregates.
struct BiasProfile {
    std::vector<double> per_dim_bias;
    double l1;
    double l2;
    double linf;
};

BiasProfile bias_profile(const DiagSquashedGaussian& d);

struct ScalingRow {
    std::size_t d;
    double mu;
    double sigma;
    double l1;
    double l2;
    double linf;
};

// One row per entry of dims, every dimension set to (mu, sigma). dims must
// be non-empty and ascending. The l1 column is exactly d times the scalar
// bias because the dimensions are identical.
std::vector<ScalingRow> bias_scaling_sweep(std::span<const std::size_t> dims, double mu,
                                           double sigma);

/// Seeded Monte Carlo comparison of the sampled histogram against analytic
/// bin masses (cdf differences) on equal-width bins over (-1, 1).
struct McReport {
    double mu;
    double sigma;
    std::size_t n_samples;
    std::size_t n_bins;
    double l1_distance;
    double empirical_mode_bin_center;
    double analytic_mode;
    std::uint64_t seed;
};

// Requires n_samples >= 1e4 and n_bins >= 20.
McReport mc_density_check(const SquashedGaussian1D& d, std::size_t n_samples, std::size_t n_bins,
                          std::uint64_t seed);

enum class FigurePreset { Motivation, Shift, BiasPoints, TwoDim };

struct CurveRow {
    double mu;
    double sigma;
    double y;
    double gaussian_pdf;      // base Gaussian evaluated at the same coordinate
    double transformed_pdf;   // squashed density at y
};

struct PointRow {
    double mu;
    double sigma;
    std::string label;  // original_mode | transformed_mode | tanh_of_original_mode
    double x;
    double y;
};

struct SurfaceRow {
    double y1;
    double y2;
    double density;
};

struct FigureData {
    FigurePreset preset;
    std::vector<CurveRow> curves;
    std::vector<PointRow> points;
    std::vector<SurfaceRow> surface;      // TwoDim only
    std::vector<double> surface_mu;       // TwoDim parameter echo
    std::vector<double> surface_sigma;
};

// Density curve over n_points evenly spaced y values on [-0.999, 0.999].
std::vector<CurveRow> density_curve(const SquashedGaussian1D& d, std::size_t n_points);

FigureData figure_data(FigurePreset preset);

std::string_view preset_token(FigurePreset preset);
FigurePreset parse_preset(std::string_view token);

// CSV emitters. A non-empty config_echo is written first as a
// `# config: ...` comment line; the schema header row always follows.
void write_curves_csv(std::ostream& os, std::span<const CurveRow> rows, std::string_view preset,
                      std::string_view config_echo);
void write_points_csv(std::ostream& os, std::span<const PointRow> rows, std::string_view preset,
                      std::string_view config_echo);
void write_surface_csv(std::ostream& os, const FigureData& fig, std::string_view config_echo);
void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows,
                       std::string_view config_echo);
void write_mc_csv(std::ostream& os, std::span<const McReport> rows, std::string_view config_echo);

}  // namespace tanhshift
