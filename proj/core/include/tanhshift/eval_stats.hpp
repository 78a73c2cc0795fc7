#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tanhshift {

/// Rectangular score table: rows are runs (seeds), columns are tasks or
/// checkpoints.
struct ScoreMatrix {
    std::vector<std::vector<double>> scores;
    std::vector<std::string> row_labels;  // optional, sized like rows when set
    std::vector<std::string> col_labels;  // optional, sized like columns when set
};

// Throws std::invalid_argument when the matrix is empty or ragged.
void validate(const ScoreMatrix& m);

// Interquartile mean: sort, drop floor(0.25*n) from each end, average the
// rest. Throws std::invalid_argument on empty input.
double iqm(std::vector<double> xs);

// Even-length median averages the two central order statistics.
double median(std::vector<double> xs);

double mean(std::span<const double> xs);

enum class AggregateMetric { Iqm, Median, Mean };

std::string_view metric_token(AggregateMetric metric);
AggregateMetric parse_metric(std::string_view token);

struct IntervalEstimate {
    double point;
    double lo;
    double hi;
    double level;
    std::size_t n_boot;
};

// Percentile bootstrap of the pooled metric: each replicate resamples rows
// with replacement independently within every column, pools the resampled
// scores, and recomputes the metric. Replicate randomness derives from
// (seed, replicate index), so results are seed-deterministic regardless of
// execution order. Requires n_boot >= 100.
IntervalEstimate stratified_bootstrap_ci(AggregateMetric metric, const ScoreMatrix& m,
                                         std::size_t n_boot = 2000, double level = 0.95,
                                         std::uint64_t seed = 0);

struct ProfilePoint {
    double tau;
    double fraction;  // fraction of (run, task) scores >= tau
};

// taus must be ascending; the output fraction is non-increasing.
std::vector<ProfilePoint> performance_profile(const ScoreMatrix& m, std::span<const double> taus);

/// One training run's evaluation history: a shared checkpoint step grid
/// and the per-episode scores recorded at each checkpoint.
struct RunCurve {
    std::vector<long> steps;
    std::vector<std::vector<double>> scores;  // scores[c] = episode scores at steps[c]
};

struct EfficiencyPoint {
    long steps;
    double iqm;
    double lo;
    double hi;
};

// Per checkpoint, pools episode scores across runs and reports IQM with a
// stratified bootstrap CI. All runs must share the same step grid; throws
// std::invalid_argument otherwise.
std::vector<EfficiencyPoint> sample_efficiency(std::span<const RunCurve> runs,
                                               std::size_t n_boot = 2000, double level = 0.95,
                                               std::uint64_t seed = 0);

// CSV emitters; non-empty config_echo becomes a leading `# config: ` line.
void write_aggregate_csv(std::ostream& os,
                         std::span<const std::pair<std::string, IntervalEstimate>> rows,
                         std::string_view config_echo);
void write_profile_csv(std::ostream& os, std::span<const ProfilePoint> rows,
                       std::string_view config_echo);
void write_efficiency_csv(std::ostream& os, std::span<const EfficiencyPoint> rows,
                          std::string_view config_echo);

}  // namespace tanhshift
