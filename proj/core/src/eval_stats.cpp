#include "tanhshift/eval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tanhshift/format.hpp"
#include "tanhshift/random.hpp"

namespace tanhshift {

namespace {

void write_echo(std::ostream& os, std::string_view config_echo) {
    if (!config_echo.empty()) os << "# config: " << config_echo << "\n";
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    // Linear interpolation between order statistics at position q*(n-1).
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double apply_metric(AggregateMetric metric, std::vector<double>& xs) {
    switch (metric) {
        case AggregateMetric::Iqm: return iqm(std::move(xs));
        case AggregateMetric::Median: return median(std::move(xs));
        case AggregateMetric::Mean: return mean(xs);
    }
    throw std::invalid_argument("unknown aggregate metric");
}

}  // namespace

void validate(const ScoreMatrix& m) {
    if (m.scores.empty() || m.scores.front().empty()) {
        throw std::invalid_argument("score matrix: need at least one row and column");
    }
    const std::size_t cols = m.scores.front().size();
    for (const auto& row : m.scores) {
        if (row.size() != cols) throw std::invalid_argument("score matrix: ragged rows");
    }
    if (!m.row_labels.empty() && m.row_labels.size() != m.scores.size()) {
        throw std::invalid_argument("score matrix: row label count mismatch");
    }
    if (!m.col_labels.empty() && m.col_labels.size() != cols) {
        throw std::invalid_argument("score matrix: column label count mismatch");
    }
}

double iqm(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("iqm: empty input");
    std::sort(xs.begin(), xs.end());
    const std::size_t trim = xs.size() / 4;  // floor(0.25*n)
    double total = 0.0;
    for (std::size_t i = trim; i < xs.size() - trim; ++i) total += xs[i];
    return total / static_cast<double>(xs.size() - 2 * trim);
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty input");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty input");
    double total = 0.0;
    for (const double x : xs) total += x;
    return total / static_cast<double>(xs.size());
}

std::string_view metric_token(AggregateMetric metric) {
    switch (metric) {
        case AggregateMetric::Iqm: return "iqm";
        case AggregateMetric::Median: return "median";
        case AggregateMetric::Mean: return "mean";
    }
    throw std::invalid_argument("unknown aggregate metric");
}

AggregateMetric parse_metric(std::string_view token) {
    if (token == "iqm") return AggregateMetric::Iqm;
    if (token == "median") return AggregateMetric::Median;
    if (token == "mean") return AggregateMetric::Mean;
    throw std::invalid_argument("unknown metric: " + std::string(token));
}

IntervalEstimate stratified_bootstrap_ci(AggregateMetric metric, const ScoreMatrix& m,
                                         std::size_t n_boot, double level, std::uint64_t seed) {
    validate(m);
    if (n_boot < 100) throw std::invalid_argument("bootstrap: n_boot must be >= 100");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap: level in (0,1)");

    const std::size_t rows = m.scores.size();
    const std::size_t cols = m.scores.front().size();

    std::vector<double> pooled;
    pooled.reserve(rows * cols);
    for (const auto& row : m.scores) pooled.insert(pooled.end(), row.begin(), row.end());
    const double point = apply_metric(metric, pooled);

    std::vector<double> replicates(n_boot);
    std::vector<double> resampled(rows * cols);
    for (std::size_t r = 0; r < n_boot; ++r) {
        Rng rng(derive_stream(seed, r));
        std::size_t out = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            for (std::size_t i = 0; i < rows; ++i) {
                resampled[out++] = m.scores[rng.index(rows)][c];
            }
        }
        std::vector<double> copy = resampled;
        replicates[r] = apply_metric(metric, copy);
    }
    std::sort(replicates.begin(), replicates.end());

    IntervalEstimate est;
    est.point = point;
    est.lo = quantile_sorted(replicates, 0.5 * (1.0 - level));
    est.hi = quantile_sorted(replicates, 0.5 * (1.0 + level));
    // Percentile intervals can land on one side of the point estimate for
    // skewed replicate distributions; the interval is widened to keep
    // lo <= point <= hi.
    est.lo = std::min(est.lo, point);
    est.hi = std::max(est.hi, point);
    est.level = level;
    est.n_boot = n_boot;
    return est;
}

std::vector<ProfilePoint> performance_profile(const ScoreMatrix& m,
                                              std::span<const double> taus) {
    validate(m);
    if (!std::is_sorted(taus.begin(), taus.end())) {
        throw std::invalid_argument("performance_profile: taus must be ascending");
    }
    const double total = static_cast<double>(m.scores.size() * m.scores.front().size());
    std::vector<ProfilePoint> out;
    out.reserve(taus.size());
    for (const double tau : taus) {
        std::size_t count = 0;
        for (const auto& row : m.scores) {
            for (const double x : row) {
                if (x >= tau) ++count;
            }
        }
        out.push_back({tau, static_cast<double>(count) / total});
    }
    return out;
}

std::vector<EfficiencyPoint> sample_efficiency(std::span<const RunCurve> runs, std::size_t n_boot,
                                               double level, std::uint64_t seed) {
    if (runs.empty()) throw std::invalid_argument("sample_efficiency: no runs");
    const std::vector<long>& grid = runs.front().steps;
    if (grid.empty()) throw std::invalid_argument("sample_efficiency: empty checkpoint grid");
    for (const RunCurve& run : runs) {
        if (run.steps != grid) {
            throw std::invalid_argument("sample_efficiency: mismatched checkpoint grids");
        }
        if (run.scores.size() != grid.size()) {
            throw std::invalid_argument("sample_efficiency: scores/steps length mismatch");
        }
    }

    std::vector<EfficiencyPoint> out;
    out.reserve(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        // Rows are runs, columns episode slots; the bootstrap resamples
        // runs within each slot.
        ScoreMatrix m;
        for (const RunCurve& run : runs) m.scores.push_back(run.scores[c]);
        const IntervalEstimate est = stratified_bootstrap_ci(
            AggregateMetric::Iqm, m, n_boot, level, derive_stream(seed, c));
        out.push_back({grid[c], est.point, est.lo, est.hi});
    }
    return out;
}

void write_aggregate_csv(std::ostream& os,
                         std::span<const std::pair<std::string, IntervalEstimate>> rows,
                         std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "metric,point,lo,hi,level,n_boot\n";
    for (const auto& [name, est] : rows) {
        os << name << ',' << format_double(est.point) << ',' << format_double(est.lo) << ','
           << format_double(est.hi) << ',' << format_double(est.level) << ',' << est.n_boot
           << '\n';
    }
}

void write_profile_csv(std::ostream& os, std::span<const ProfilePoint> rows,
                       std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "tau,fraction\n";
    for (const auto& p : rows) {
        os << format_double(p.tau) << ',' << format_double(p.fraction) << '\n';
    }
}

void write_efficiency_csv(std::ostream& os, std::span<const EfficiencyPoint> rows,
                          std::string_view config_echo) {
    write_echo(os, config_echo);
    os << "steps,iqm,lo,hi\n";
    for (const auto& p : rows) {
        os << p.steps << ',' << format_double(p.iqm) << ',' << format_double(p.lo) << ','
           << format_double(p.hi) << '\n';
    }
}

}  // namespace tanhshift
