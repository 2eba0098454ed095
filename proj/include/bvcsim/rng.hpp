#ifndef BVCSIM_RNG_HPP
#define BVCSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace bvcsim {

/// Deterministic random source. Distributions are generated explicitly
/// (not via std::*_distribution) so streams are identical across standard
/// library implementations for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Normal via Box-Muller; consumes exactly two uniforms per draw.
    double normal(double mean, double stddev) {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Decorrelated stream for a sub-task (splitmix64 of seed and index).
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
        std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace bvcsim

#endif
