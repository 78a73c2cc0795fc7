#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "tanhshift/mode_solver.hpp"

using namespace tanhshift;

namespace {

std::vector<double> sweep_mu() {
    std::vector<double> v;
    for (int i = -12; i <= 12; ++i) v.push_back(0.25 * i);
    return v;
}

std::vector<double> sweep_sigma() {
    std::vector<double> v;
    for (int i = 1; i <= 20; ++i) v.push_back(0.1 * i);
    return v;
}

void check_mode_result(const SquashedGaussian1D& d, const ModeResult& r) {
    CHECK(std::fabs(r.y_star) < 1.0);
    CHECK(r.y_star == doctest::Approx(std::tanh(r.t_star)).epsilon(1e-9));
    CHECK(r.density_at_mode == doctest::Approx(pdf(d, r.y_star)).epsilon(1e-12));
    CHECK(r.density_at_mode > 0.0);
}

}  // namespace

TEST_CASE("grid scan walks the fixed action grid") {
    const ModeResult r = grid_mode(SquashedGaussian1D(1.0, 0.5));
    CHECK(r.method == ModeMethod::GridScan);
    CHECK(r.evaluations == 4996);
    CHECK(std::fabs(r.y_star - 0.8954) <= 4e-4);
    check_mode_result(SquashedGaussian1D(1.0, 0.5), r);

    const ModeResult centered = grid_mode(SquashedGaussian1D(0.0, 0.5));
    CHECK(std::fabs(centered.y_star) <= 2.1e-4);

    const ModeResult mirrored = grid_mode(SquashedGaussian1D(-1.0, 0.5));
    CHECK(mirrored.y_star == doctest::Approx(-r.y_star).epsilon(1e-12));
}

TEST_CASE("grid argmax beats every grid point") {
    const SquashedGaussian1D d(1.3, 0.9);
    const ModeResult r = grid_mode(d);
    const double best = log_pdf(d, r.y_star);
    for (int i = 0; i <= 4995; ++i) {
        const double y = -0.999 + 0.0004 * i;
        CHECK(best >= log_pdf(d, y));
    }
}

TEST_CASE("unimodal stationary analysis") {
    const ModeSet s = stationary_points(SquashedGaussian1D(0.0, 0.5));
    REQUIRE(s.stationary_points.size() == 1);
    CHECK(s.stationary_points[0].t == 0.0);
    CHECK(s.stationary_points[0].kind == StationaryKind::LocalMax);
    CHECK_FALSE(s.bimodal);
    CHECK(s.global.y_star == 0.0);

    const ModeSet shifted = stationary_points(SquashedGaussian1D(1.0, 0.5));
    REQUIRE(shifted.stationary_points.size() == 1);
    CHECK_FALSE(shifted.bimodal);

    // independent fixed-point oracle: t <- 1 + 0.5*tanh(t)
    double t_fp = 1.0;
    for (int i = 0; i < 200; ++i) t_fp = 1.0 + 0.5 * std::tanh(t_fp);
    CHECK(shifted.global.t_star == doctest::Approx(t_fp).epsilon(1e-10));
    check_mode_result(SquashedGaussian1D(1.0, 0.5), shifted.global);
}

TEST_CASE("symmetric bimodal case splits into three stationary points") {
    const SquashedGaussian1D d(0.0, 1.0);
    const ModeSet s = stationary_points(d);
    REQUIRE(s.stationary_points.size() == 3);
    CHECK(s.bimodal);

    int n_max = 0, n_min = 0;
    for (const auto& p : s.stationary_points) {
        (p.kind == StationaryKind::LocalMax ? n_max : n_min)++;
    }
    CHECK(n_max == 2);
    CHECK(n_min == 1);

    // independent bisection oracle on t = 2 tanh(t)
    const double t_oracle =
        testing::bisect([](double t) { return t - 2.0 * std::tanh(t); }, 1.5, 2.5);
    const double y_oracle = std::tanh(t_oracle);
    CHECK(s.global.t_star == doctest::Approx(t_oracle).epsilon(1e-10));
    CHECK(s.global.y_star == doctest::Approx(y_oracle).epsilon(1e-10));
    CHECK(std::fabs(s.global.y_star - 0.9575) <= 1e-3);
    CHECK(s.global.y_star > 0.0);  // tie resolves to the positive mode

    // the two maxima mirror each other with equal densities
    double d_pos = 0.0, d_neg = 0.0;
    for (const auto& p : s.stationary_points) {
        if (p.kind == StationaryKind::LocalMax) (p.t > 0 ? d_pos : d_neg) = p.density;
    }
    CHECK(d_pos == doctest::Approx(d_neg).epsilon(1e-12));
    for (const auto& p : s.stationary_points) CHECK(s.global.density_at_mode >= p.density);
}

TEST_CASE("bimodality flips exactly across 2 sigma^2 = 1") {
    CHECK_FALSE(stationary_points(SquashedGaussian1D(0.0, 0.70)).bimodal);
    CHECK(stationary_points(SquashedGaussian1D(0.0, 0.72)).bimodal);
    CHECK_FALSE(stationary_points(SquashedGaussian1D(0.0, 1.0 / std::sqrt(2.0))).bimodal);
}

TEST_CASE("analytic mode reference values") {
    const ModeResult r = analytic_mode(SquashedGaussian1D(1.0, 0.5));
    CHECK(r.method == ModeMethod::Analytic);
    CHECK(r.y_star == doctest::Approx(0.8952191961798105).epsilon(1e-10));
    CHECK(analytic_mode(SquashedGaussian1D(0.0, 0.5)).y_star == 0.0);
    check_mode_result(SquashedGaussian1D(1.0, 0.5), r);
}

TEST_CASE("grid and analytic modes agree across the sweep") {
    // The grid stops at +-0.999, so when the true mode lies beyond the last
    // grid point the comparison projects it onto the grid's span and the
    // scan must have picked the end point.
    for (double mu : sweep_mu()) {
        for (double sigma : sweep_sigma()) {
            const SquashedGaussian1D d(mu, sigma);
            const double g = grid_mode(d).y_star;
            const double a = analytic_mode(d).y_star;
            const double proj = std::clamp(a, -0.999, 0.999);
            if (mu == 0.0 && 2.0 * sigma * sigma > 1.0) {
                CHECK(std::fabs(std::fabs(g) - std::fabs(proj)) <= 4e-4);  // tie broken oppositely
            } else {
                CHECK(std::fabs(g - proj) <= 4e-4);
            }
            if (std::fabs(a) > 0.999) CHECK(std::fabs(g) > 0.9989);
        }
    }
}

TEST_CASE("corrected mode never loses density to the naive action") {
    for (double mu : sweep_mu()) {
        for (double sigma : sweep_sigma()) {
            const SquashedGaussian1D d(mu, sigma);
            const double y_star = analytic_mode(d).y_star;
            const double corrected = log_pdf(d, y_star);
            const double naive = log_pdf(d, std::tanh(mu));
            CHECK(corrected >= naive - 1e-12 * std::max(1.0, std::fabs(naive)));
            if (mu != 0.0 && sigma >= 0.2) CHECK(corrected > naive);
        }
    }
}

TEST_CASE("mode shifts boundary-ward") {
    for (double mu : sweep_mu()) {
        for (double sigma : sweep_sigma()) {
            const double y_star = analytic_mode(SquashedGaussian1D(mu, sigma)).y_star;
            if (mu > 0.0) CHECK(y_star >= std::tanh(mu));
            if (mu < 0.0) CHECK(y_star <= std::tanh(mu));
        }
    }
}

TEST_CASE("mode is strictly increasing in mu when unimodality is guaranteed") {
    for (double sigma : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}) {
        double prev = -2.0;
        for (double mu : sweep_mu()) {
            const double y_star = analytic_mode(SquashedGaussian1D(mu, sigma)).y_star;
            CHECK(y_star > prev);
            prev = y_star;
        }
    }
}

TEST_CASE("naive action and bias") {
    CHECK(naive_action(SquashedGaussian1D(0.0, 1.0)) == 0.0);
    CHECK(naive_action(SquashedGaussian1D(1.0, 0.5)) ==
          doctest::Approx(0.7615941559557649).epsilon(1e-12));
    CHECK(naive_action(SquashedGaussian1D(-1.0, 0.5)) ==
          -naive_action(SquashedGaussian1D(1.0, 0.5)));

    CHECK(action_bias(SquashedGaussian1D(0.0, 0.5)) == 0.0);
    CHECK(std::fabs(action_bias(SquashedGaussian1D(1.0, 0.5)) - 0.1338) <= 1e-3);
    CHECK(action_bias(SquashedGaussian1D(1.0, 0.5)) ==
          doctest::Approx(0.13362504022404564).epsilon(1e-12));
}

TEST_CASE("bias vanishes with sigma") {
    for (double mu : {-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0}) {
        CHECK(action_bias(SquashedGaussian1D(mu, 1e-3)) < 1e-5);
    }
    CHECK(action_bias(SquashedGaussian1D(1.0, 0.01)) < 1e-4);
}

TEST_CASE("solver converges over the stress region") {
    for (double mu = -6.0; mu <= 6.0; mu += 0.5) {
        for (double sigma = 0.25; sigma <= 4.0; sigma += 0.25) {
            const SquashedGaussian1D d(mu, sigma);
            ModeSet s;
            REQUIRE_NOTHROW(s = stationary_points(d));
            CHECK(s.stationary_points.size() >= 1);
            CHECK(s.stationary_points.size() <= 3);
            int n_max = 0;
            for (const auto& p : s.stationary_points) {
                if (p.kind == StationaryKind::LocalMax) ++n_max;
                CHECK(s.global.density_at_mode >= p.density);
            }
            CHECK(s.bimodal == (n_max == 2));
            check_mode_result(d, s.global);
        }
    }
}
