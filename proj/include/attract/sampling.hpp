#pragma once

#include <cstdint>
#include <random>

#include "attract/core.hpp"
#include "attract/projective.hpp"

namespace attract {

/// Seeded generator. The engine is std::mt19937_64; the uniform and normal
/// transforms are written out because the standard distributions are not
/// reproducible across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for item `index` of a run seeded with `seed`.
    static Rng derived(std::uint64_t seed, std::uint64_t index) { return Rng(splitmix64(seed ^ splitmix64(index + 1))); }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    cplx complex_normal() {
        const double a = normal(), b = normal();
        return {a, b};
    }

    /// Uniform in the disc of radius r.
    cplx disc(double r) { return std::polar(r * std::sqrt(uniform()), 2.0 * kPi * uniform()); }

    /// Fubini-Study uniform point of P^1.
    P1 p1() { return P1({complex_normal(), complex_normal()}); }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace attract
