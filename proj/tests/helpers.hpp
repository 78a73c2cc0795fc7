#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tanhshift/squashed_gaussian.hpp"

namespace tanhshift::testing {

// chi-square critical value, 99 dof, upper tail p = 0.001
inline constexpr double kChi2Crit99 = 148.23035916510172;

// Integral of pdf over (-1,1) by Simpson's rule in pre-squash space:
// substituting y = tanh(t) gives integrand pdf(tanh t) * (1 - tanh^2 t),
// with the weight evaluated from t directly so clamped tail points vanish.
inline double normalization_quadrature(const SquashedGaussian1D& d) {
    const double lo = d.base.mu - 8.0 * d.base.sigma;
    const double hi = d.base.mu + 8.0 * d.base.sigma;
    const std::size_t n = 20000;
    const double h = (hi - lo) / static_cast<double>(n);
    const auto f = [&](double t) { return pdf(d, std::tanh(t)) * std::exp(log1m_tanh_sq(t)); };
    double s = f(lo) + f(hi);
    for (std::size_t i = 1; i < n; ++i) s += f(lo + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double chi_square_uniform(const std::vector<long>& counts, double expected) {
    double stat = 0.0;
    for (long c : counts) {
        const double dd = static_cast<double>(c) - expected;
        stat += dd * dd / expected;
    }
    return stat;
}

// Sign-safe bisection to 1e-12; the test-side root oracle.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || hi - lo < 1e-13) return mid;
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct CoutCapture {
    std::ostringstream buffer;
    std::streambuf* saved_out;
    std::streambuf* saved_err;

    CoutCapture()
        : saved_out(std::cout.rdbuf(buffer.rdbuf())), saved_err(std::cerr.rdbuf(buffer.rdbuf())) {}
    ~CoutCapture() {
        std::cout.rdbuf(saved_out);
        std::cerr.rdbuf(saved_err);
    }
    std::string text() const { return buffer.str(); }
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("test cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

// Fresh empty scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tanhshift_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace tanhshift::testing
