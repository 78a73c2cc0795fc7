#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "tanhshift/eval_stats.hpp"
#include "tanhshift/random.hpp"

using namespace tanhshift;

namespace {

ScoreMatrix matrix_of(std::vector<std::vector<double>> rows) {
    ScoreMatrix m;
    m.scores = std::move(rows);
    return m;
}

ScoreMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    ScoreMatrix m;
    m.scores.resize(rows);
    for (auto& row : m.scores) {
        row.resize(cols);
        for (double& v : row) v = rng.gaussian(0.5, 0.2);
    }
    return m;
}

}  // namespace

TEST_CASE("interquartile mean") {
    CHECK(iqm({1.0, 2.0, 3.0, 4.0}) == 2.5);
    CHECK(iqm({5.0}) == 5.0);
    CHECK(iqm({3.0, 1.0, 2.0}) == 2.0);
    CHECK(iqm({8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0}) == 4.5);
    CHECK_THROWS_AS(iqm({}), std::invalid_argument);

    SUBCASE("permutation invariance") {
        std::vector<double> xs = {0.3, -1.0, 2.5, 0.7, 0.1, 9.0, -4.0};
        std::vector<double> shuffled = {9.0, 0.1, -4.0, 0.3, 2.5, -1.0, 0.7};
        CHECK(iqm(xs) == iqm(shuffled));
    }
    SUBCASE("adding a constant shifts the result by it") {
        const std::vector<double> xs = {0.2, 0.9, 0.4, 0.8, 0.1, 0.6};
        std::vector<double> shifted = xs;
        for (double& v : shifted) v += 3.0;
        CHECK(iqm(shifted) == doctest::Approx(iqm(xs) + 3.0).epsilon(1e-12));
    }
    SUBCASE("stays inside the data range") {
        Rng rng(4);
        std::vector<double> xs(17);
        for (double& v : xs) v = rng.uniform(-5.0, 5.0);
        const double m = iqm(xs);
        CHECK(m >= *std::min_element(xs.begin(), xs.end()));
        CHECK(m <= *std::max_element(xs.begin(), xs.end()));
    }
}

TEST_CASE("median and mean") {
    CHECK(median({7.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
    CHECK(mean(std::vector<double>{1.0, 2.0, 4.0}) == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(mean(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("metric tokens roundtrip") {
    for (const auto metric :
         {AggregateMetric::Iqm, AggregateMetric::Median, AggregateMetric::Mean}) {
        CHECK(parse_metric(metric_token(metric)) == metric);
    }
    CHECK_THROWS_AS(parse_metric("mode"), std::invalid_argument);
}

TEST_CASE("score matrix validation") {
    CHECK_NOTHROW(validate(matrix_of({{1.0, 2.0}, {3.0, 4.0}})));
    CHECK_THROWS_AS(validate(matrix_of({})), std::invalid_argument);
    CHECK_THROWS_AS(validate(matrix_of({{}})), std::invalid_argument);
    CHECK_THROWS_AS(validate(matrix_of({{1.0, 2.0}, {3.0}})), std::invalid_argument);

    ScoreMatrix labeled = matrix_of({{1.0}, {2.0}});
    labeled.row_labels = {"only-one"};
    CHECK_THROWS_AS(validate(labeled), std::invalid_argument);
    labeled.row_labels = {"a", "b"};
    labeled.col_labels = {"x", "extra"};
    CHECK_THROWS_AS(validate(labeled), std::invalid_argument);
    labeled.col_labels = {"x"};
    CHECK_NOTHROW(validate(labeled));
}

TEST_CASE("stratified bootstrap") {
    SUBCASE("a constant table gives a degenerate interval") {
        const auto est = stratified_bootstrap_ci(
            AggregateMetric::Iqm, matrix_of({{0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}}), 200, 0.95, 0);
        CHECK(est.point == 0.7);
        CHECK(est.lo == 0.7);
        CHECK(est.hi == 0.7);
        CHECK(est.level == 0.95);
        CHECK(est.n_boot == 200);
    }
    SUBCASE("seed determinism") {
        const ScoreMatrix m = gaussian_matrix(6, 4, 2);
        const auto a = stratified_bootstrap_ci(AggregateMetric::Iqm, m, 300, 0.9, 5);
        const auto b = stratified_bootstrap_ci(AggregateMetric::Iqm, m, 300, 0.9, 5);
        CHECK(a.point == b.point);
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
        const auto c = stratified_bootstrap_ci(AggregateMetric::Iqm, m, 300, 0.9, 6);
        CHECK((a.lo != c.lo || a.hi != c.hi));
    }
    SUBCASE("the interval brackets the point estimate") {
        for (const auto metric :
             {AggregateMetric::Iqm, AggregateMetric::Median, AggregateMetric::Mean}) {
            const auto est =
                stratified_bootstrap_ci(metric, gaussian_matrix(9, 5, 8), 400, 0.95, 1);
            CHECK(est.lo <= est.point);
            CHECK(est.point <= est.hi);
        }
    }
    SUBCASE("argument validation") {
        const ScoreMatrix m = matrix_of({{1.0}, {2.0}});
        CHECK_THROWS_AS(stratified_bootstrap_ci(AggregateMetric::Mean, m, 99, 0.95, 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(stratified_bootstrap_ci(AggregateMetric::Mean, m, 200, 0.0, 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(stratified_bootstrap_ci(AggregateMetric::Mean, m, 200, 1.0, 0),
                        std::invalid_argument);
    }
    SUBCASE("matches a from-scratch reimplementation on a skewed column") {
        ScoreMatrix m;
        for (int i = 0; i < 10; ++i) m.scores.push_back({i == 9 ? 1.0 : 0.0});
        const std::size_t n_boot = 500;
        const std::uint64_t seed = 9;
        const auto est = stratified_bootstrap_ci(AggregateMetric::Mean, m, n_boot, 0.95, seed);

        std::vector<double> replicates(n_boot);
        for (std::size_t r = 0; r < n_boot; ++r) {
            Rng rng(derive_stream(seed, r));
            double total = 0.0;
            for (int i = 0; i < 10; ++i) total += m.scores[rng.index(10)][0];
            replicates[r] = total / 10.0;
        }
        std::sort(replicates.begin(), replicates.end());
        auto quant = [&replicates](double q) {
            const double pos = q * static_cast<double>(replicates.size() - 1);
            const auto lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, replicates.size() - 1);
            return replicates[lo] + (pos - static_cast<double>(lo)) * (replicates[hi] - replicates[lo]);
        };
        const double point = 0.1;
        CHECK(est.point == point);
        CHECK(est.lo == std::min(quant(0.025), point));
        CHECK(est.hi == std::max(quant(0.975), point));
        CHECK(est.lo >= 0.0);
        CHECK(est.hi <= 0.5);
    }
    SUBCASE("more runs tighten the interval") {
        for (const std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
            const auto small =
                stratified_bootstrap_ci(AggregateMetric::Iqm, gaussian_matrix(5, 10, seed),
                                        2000, 0.95, seed);
            const auto large =
                stratified_bootstrap_ci(AggregateMetric::Iqm, gaussian_matrix(50, 10, seed + 100),
                                        2000, 0.95, seed);
            CHECK(small.hi - small.lo >= large.hi - large.lo);
        }
    }
}

TEST_CASE("performance profiles") {
    const ScoreMatrix m = matrix_of({{0.0, 1.0}, {1.0, 1.0}});
    SUBCASE("fractions count scores at or above tau") {
        const std::vector<double> taus = {-0.5, 0.5, 1.0, 1.5};
        const auto prof = performance_profile(m, taus);
        REQUIRE(prof.size() == 4);
        CHECK(prof[0].tau == -0.5);
        CHECK(prof[0].fraction == 1.0);
        CHECK(prof[1].fraction == 0.75);
        CHECK(prof[2].fraction == 0.75);
        CHECK(prof[3].fraction == 0.0);
    }
    SUBCASE("fractions never increase along ascending taus") {
        const ScoreMatrix random = gaussian_matrix(7, 6, 3);
        std::vector<double> taus;
        for (int i = 0; i <= 40; ++i) taus.push_back(i / 40.0);
        const auto prof = performance_profile(random, taus);
        for (std::size_t i = 1; i < prof.size(); ++i) {
            CHECK(prof[i].fraction <= prof[i - 1].fraction);
        }
        for (const auto& p : prof) {
            CHECK(p.fraction >= 0.0);
            CHECK(p.fraction <= 1.0);
        }
    }
    SUBCASE("unsorted taus are rejected") {
        const std::vector<double> bad = {0.5, 0.2};
        CHECK_THROWS_AS(performance_profile(m, bad), std::invalid_argument);
    }
}

TEST_CASE("sample efficiency curves") {
    SUBCASE("constant scores produce degenerate intervals on the step grid") {
        RunCurve a{{100, 200}, {{0.5, 0.5}, {0.5, 0.5}}};
        RunCurve b = a;
        RunCurve c = a;
        const std::vector<RunCurve> runs = {a, b, c};
        const auto points = sample_efficiency(runs, 200, 0.95, 0);
        REQUIRE(points.size() == 2);
        CHECK(points[0].steps == 100);
        CHECK(points[1].steps == 200);
        for (const auto& p : points) {
            CHECK(p.iqm == 0.5);
            CHECK(p.lo == 0.5);
            CHECK(p.hi == 0.5);
        }
    }
    SUBCASE("the curve follows pooled per-checkpoint scores") {
        RunCurve a{{10, 20}, {{0.2, 0.2}, {0.8, 0.8}}};
        RunCurve b{{10, 20}, {{0.2, 0.2}, {0.8, 0.8}}};
        const std::vector<RunCurve> runs = {a, b};
        const auto points = sample_efficiency(runs, 150, 0.95, 4);
        CHECK(points[0].iqm == 0.2);
        CHECK(points[1].iqm == 0.8);
        CHECK(points[0].lo <= points[0].iqm);
        CHECK(points[1].hi >= points[1].iqm);
    }
    SUBCASE("mismatched grids and shapes are rejected") {
        RunCurve a{{10, 20}, {{0.1}, {0.2}}};
        RunCurve b{{10, 30}, {{0.1}, {0.2}}};
        const std::vector<RunCurve> bad_grid = {a, b};
        CHECK_THROWS_AS(sample_efficiency(bad_grid, 200, 0.95, 0), std::invalid_argument);

        RunCurve c{{10, 20}, {{0.1}}};
        const std::vector<RunCurve> bad_shape = {a, c};
        CHECK_THROWS_AS(sample_efficiency(bad_shape, 200, 0.95, 0), std::invalid_argument);

        CHECK_THROWS_AS(sample_efficiency({}, 200, 0.95, 0), std::invalid_argument);
    }
}

TEST_CASE("iqm and median shrug off a wild outlier that drags the mean") {
    std::vector<double> xs(20);
    for (int i = 0; i < 20; ++i) xs[i] = static_cast<double>(i + 1);
    const double range = 19.0;

    std::vector<double> polluted = xs;
    polluted[19] = 1e6;

    CHECK(std::fabs(iqm(polluted) - iqm(xs)) == 0.0);
    CHECK(std::fabs(median(polluted) - median(xs)) == 0.0);
    CHECK(std::fabs(mean(polluted) - mean(xs)) > 100.0 * range);
}

TEST_CASE("statistics tables serialize to stable CSV") {
    SUBCASE("aggregate rows") {
        std::ostringstream os;
        const std::vector<std::pair<std::string, IntervalEstimate>> rows = {
            {"iqm", {0.5, 0.25, 0.75, 0.95, 2000}}};
        write_aggregate_csv(os, rows, "");
        CHECK(os.str() == "metric,point,lo,hi,level,n_boot\niqm,0.5,0.25,0.75,0.95,2000\n");
    }
    SUBCASE("config echo precedes the header") {
        std::ostringstream os;
        const std::vector<std::pair<std::string, IntervalEstimate>> rows = {
            {"mean", {1.0, 1.0, 1.0, 0.9, 100}}};
        write_aggregate_csv(os, rows, "{\"runs\":3}");
        CHECK(os.str() ==
              "# config: {\"runs\":3}\nmetric,point,lo,hi,level,n_boot\nmean,1,1,1,0.9,100\n");
    }
    SUBCASE("profile rows") {
        std::ostringstream os;
        const std::vector<ProfilePoint> rows = {{0.5, 0.75}, {1.0, 0.0}};
        write_profile_csv(os, rows, "");
        CHECK(os.str() == "tau,fraction\n0.5,0.75\n1,0\n");
    }
    SUBCASE("efficiency rows") {
        std::ostringstream os;
        const std::vector<EfficiencyPoint> rows = {{100, 0.5, 0.25, 0.75}};
        write_efficiency_csv(os, rows, "");
        CHECK(os.str() == "steps,iqm,lo,hi\n100,0.5,0.25,0.75\n");
    }
}
