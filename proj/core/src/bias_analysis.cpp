#include "tanhshift/bias_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tanhshift/format.hpp"
#include "tanhshift/mode_solver.hpp"

namespace tanhshift {

namespace {

void write_echo(std::ostream& os, std::string_view config_echo) {
    if (!config_echo.empty()) os << "# config: " << config_echo << "\n";
}

}  // namespace

BiasProfile bias_profile(const DiagSquashedGaussian& d) {
    BiasProfile profile;
    profile.per_dim_bias.reserve(d.dims());
    double l1 = 0.0, sq = 0.0, linf = 0.0;
    for (std::size_t i = 0; i < d.dims(); ++i) {
        const double b = action_bias(d.dim(i));
        profile.per_dim_bias.push_back(b);
        l1 += b;
        sq += b * b;
        linf = std::max(linf, b);
    }
    profile.l1 = l1;
    profile.l2 = std::sqrt(sq);
    profile.linf = linf;
    return profile;
}

std::vector<ScalingRow> bias_scaling_sweep(std::span<const std::size_t> dims, double mu,
                                           double sigma) {
    if (dims.empty()) throw std::invalid_argument("bias_scaling_sweep: dims must be non-empty");
    if (!std::is_sorted(dims.begin(), dims.end())) {
        throw std::invalid_argument("bias_scaling_sweep: dims must be ascending");
    }
    if (dims.front() == 0) throw std::invalid_argument("bias_scaling_sweep: dims must be positive");

    // The scalar bias is solved once; identical dimensions make every
    // aggregate an exact closed form of it, so l1 is linear in d by
    // construction rather than up to solver noise.
    const double scalar_bias = action_bias(SquashedGaussian1D(mu, sigma));
    std::vector<ScalingRow> rows;
    rows.reserve(dims.size());
    for (const std::size_t d : dims) {
        const double dd = static_cast<double>(d);
        rows.push_back({d, mu, sigma, dd * scalar_bias, std::sqrt(dd) * scalar_bias, scalar_bias});
    }
    return rows;
}

McReport mc_density_check(const SquashedGaussian1D& d, std::size_t n_samples, std::size_t n_bins,
                          std::uint64_t seed) {
    if (n_samples < 10000) throw std::invalid_argument("mc_density_check: n_samples must be >= 1e4");
    if (n_bins < 20) throw std::invalid_argument("mc_density_check: n_bins must be >= 20");

    const double width = 2.0 / static_cast<double>(n_bins);
    std::vector<std::size_t> counts(n_bins, 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double y = sample(d, rng);
        auto bin = static_cast<std::size_t>((y + 1.0) / width);
        if (bin >= n_bins) bin = n_bins - 1;
        ++counts[bin];
    }

    // Analytic bin mass from cdf differences: exact for the comparison,
    // unlike a midpoint-pdf approximation.
    double l1 = 0.0;
    double prev_cdf = cdf(d, -1.0 + kBoundaryClamp);
    std::size_t best_bin = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double right = -1.0 + width * static_cast<double>(b + 1);
        const double next_cdf = b + 1 == n_bins ? cdf(d, 1.0 - kBoundaryClamp) : cdf(d, right);
        const double analytic = next_cdf - prev_cdf;
        const double empirical =
            static_cast<double>(counts[b]) / static_cast<double>(n_samples);
        l1 += std::fabs(empirical - analytic);
        prev_cdf = next_cdf;
        if (counts[b] > counts[best_bin]) best_bin = b;
    }

    McReport report;
    report.mu = d.base.mu;
    report.sigma = d.base.sigma;
    report.n_samples = n_samples;
    report.n_bins = n_bins;
    report.l1_distance = l1;
    report.empirical_mode_bin_center = -1.0 + width * (static_cast<double>(best_bin) + 0.5);
    report.analytic_mode = analytic_mode(d).y_star;
    report.seed = seed;
    return report;
}

std::vector<CurveRow> density_curve(const SquashedGaussian1D& d, std::size_t n_points) {
    if (n_points < 2) throw std::invalid_argument("density_curve: need at least 2 points");
    std::vector<CurveRow> rows;
    rows.reserve(n_points);
    const double lo = -0.999, hi = 0.999;
    const double step = (hi - lo) / static_cast<double>(n_points - 1);
    const Gaussian1D& g = d.base;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double y = lo + step * static_cast<double>(i);
        rows.push_back({g.mu, g.sigma, y, base_pdf(g, y), pdf(d, y)});
    }
    return rows;
}

FigureData figure_data(FigurePreset preset) {
    FigureData fig;
    fig.preset = preset;
    constexpr double kSigma = 0.5;

    switch (preset) {
        case FigurePreset::Motivation:
        case FigurePreset::Shift: {
            for (const double mu : {1.0, 0.0, -1.0}) {
                const auto curve = density_curve(SquashedGaussian1D(mu, kSigma), 2001);
                fig.curves.insert(fig.curves.end(), curve.begin(), curve.end());
            }
            break;
        }
        case FigurePreset::BiasPoints: {
            for (const double mu : {1.0, -1.0}) {
                const SquashedGaussian1D d(mu, kSigma);
                const double y_star = analytic_mode(d).y_star;
                const double naive = naive_action(d);
                fig.points.push_back(
                    {mu, kSigma, "original_mode", mu, base_pdf(d.base, mu)});
                fig.points.push_back({mu, kSigma, "transformed_mode", y_star, pdf(d, y_star)});
                fig.points.push_back(
                    {mu, kSigma, "tanh_of_original_mode", naive, pdf(d, naive)});
            }
            break;
        }
        case FigurePreset::TwoDim: {
            fig.surface_mu = {1.0, 1.0};
            fig.surface_sigma = {kSigma, kSigma};
            const SquashedGaussian1D d(1.0, kSigma);
            constexpr std::size_t kGrid = 201;
            const double lo = -0.999, hi = 0.999;
            const double step = (hi - lo) / static_cast<double>(kGrid - 1);
            std::vector<double> marginal(kGrid);
            std::vector<double> ys(kGrid);
            for (std::size_t i = 0; i < kGrid; ++i) {
                ys[i] = lo + step * static_cast<double>(i);
                marginal[i] = pdf(d, ys[i]);
            }
            fig.surface.reserve(kGrid * kGrid);
            for (std::size_t i = 0; i < kGrid; ++i) {
                for (std::size_t j = 0; j < kGrid; ++j) {
                    fig.surface.push_back({ys[i], ys[j], marginal[i] * marginal[j]});
                }
            }
            const double y_star = analytic_mode(d).y_star;
            const double naive = naive_action(d);
            fig.points.push_back({1.0, kSigma, "transformed_mode", y_star, y_star});
            fig.points.push_back({1.0, kSigma, "tanh_of_original_mode", naive, naive});
            break;
        }
    }
    return fig;
}

std::string_view preset_token(FigurePreset preset) {
    switch (preset) {
        case FigurePreset::Motivation: return "motivation";
        case FigurePreset::Shift: return "shift";
        case FigurePreset::BiasPoints: return "bias-points";
        case FigurePreset::TwoDim: return "2d";
    }
    throw std::invalid_argument("unknown figure preset");
}

FigurePreset parse_preset(std::string_view token) {
    if (token == "motivation") return FigurePreset::Motivation;
    if (token == "shift") return FigurePreset::Shift;
    if (token == "bias-points") return FigurePreset::BiasPoints;
    if (token == "2d") return FigurePreset::TwoDim;
    throw std::invalid_argument("unknown figure preset: " + std::string(token));
}

void write_curves_csv(std::ostream& os, std::span<const CurveRow> rows, std::string_view preset,
                      std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "preset,mu,sigma,y,gaussian_pdf,transformed_pdf\n";
    for (const auto& r : rows) {
        os << preset << ',' << format_double(r.mu) << ',' << format_double(r.sigma) << ','
           << format_double(r.y) << ',' << format_double(r.gaussian_pdf) << ','
           << format_double(r.transformed_pdf) << '\n';
    }
}

void write_points_csv(std::ostream& os, std::span<const PointRow> rows, std::string_view preset,
                      std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "preset,mu,sigma,label,x,y\n";
    for (const auto& r : rows) {
        os << preset << ',' << format_double(r.mu) << ',' << format_double(r.sigma) << ','
           << r.label << ',' << format_double(r.x) << ',' << format_double(r.y) << '\n';
    }
}

void write_surface_csv(std::ostream& os, const FigureData& fig, std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "preset,mu1,mu2,sigma1,sigma2,y1,y2,density\n";
    const std::string_view preset = preset_token(fig.preset);
    for (const auto& r : fig.surface) {
        os << preset << ',' << format_double(fig.surface_mu[0]) << ','
           << format_double(fig.surface_mu[1]) << ',' << format_double(fig.surface_sigma[0]) << ','
           << format_double(fig.surface_sigma[1]) << ',' << format_double(r.y1) << ','
           << format_double(r.y2) << ',' << format_double(r.density) << '\n';
    }
}

void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows,
                       std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "d,mu,sigma,l1,l2,linf\n";
    for (const auto& r : rows) {
        os << r.d << ',' << format_double(r.mu) << ',' << format_double(r.sigma) << ','
           << format_double(r.l1) << ',' << format_double(r.l2) << ',' << format_double(r.linf)
           << '\n';
    }
}

void write_mc_csv(std::ostream& os, std::span<const McReport> rows, std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "mu,sigma,n_samples,n_bins,l1_distance,empirical_mode,analytic_mode,seed\n";
    for (const auto& r : rows) {
        os << format_double(r.mu) << ',' << format_double(r.sigma) << ',' << r.n_samples << ','
           << r.n_bins << ',' << format_double(r.l1_distance) << ','
           << format_double(r.empirical_mode_bin_center) << ',' << format_double(r.analytic_mode)
           << ',' << r.seed << '\n';
    }
}

}  // namespace tanhshift
