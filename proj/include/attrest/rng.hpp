#pragma once

#include <cmath>
#include <cstdint>

namespace attrest {

/// SplitMix64 (Steele, Lea & Flood 2014). Small, fast and fully portable:
/// results depend only on the seed, never on platform or library version.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Replicate r of a run with master seed m uses the stream seeded by
/// mix_seed(m, r): one SplitMix64 step over m xor a Weyl increment of r.
/// Fixed and published so runs are reproducible across platforms and
/// independent of execution order.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 mixer(master ^ ((index + 1) * 0xD1B54A32D192ED03ULL));
    return mixer.next();
}

/// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection;
/// unbiased and portable. bound must be > 0.
inline std::uint64_t bounded(SplitMix64& rng, std::uint64_t bound) {
    while (true) {
        std::uint64_t x = rng.next();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low >= bound || low >= (0ULL - bound) % bound)
            return static_cast<std::uint64_t>(m >> 64);
    }
}

/// Standard normal deviate via basic Box-Muller (two uniforms per value;
/// std::normal_distribution is avoided because its output is not pinned by
/// the standard).
inline double gaussian(SplitMix64& rng) {
    double u1 = rng.next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = rng.next_unit();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace attrest
