#pragma once

#include <cstdint>
#include <random>

namespace tanhshift {

// Stateless 64-bit mixer (splitmix64 finalizer).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a root seed and a stream id:
// the id-th state of the splitmix64 sequence whose state is
// splitmix64(seed). Order-dependent, so (a, b) and (b, a) differ and
// seed == id pairs stay distinct across seeds.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t id) {
    return splitmix64(splitmix64(seed) + id * 0x9e3779b97f4a7c15ULL);
}

/// Seeded random stream. All draws are deterministic per seed on one
/// platform; substreams are derived from seeds, never from engine state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() { return normal_(engine_); }

    double gaussian(double mu, double sigma) { return mu + sigma * gaussian(); }

    // Uniform index in [0, n); n must be positive.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n));
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tanhshift
