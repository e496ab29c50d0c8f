#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hybrid {

/// Platform-independent draws on top of mt19937_64 (the distributions in
/// <random> are implementation-defined and would break cross-platform
/// byte determinism).

inline double next_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
}

inline std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t n) {
    // modulo bias is negligible for n << 2^64
    return n == 0 ? 0 : rng() % n;
}

inline double normal(std::mt19937_64& rng) {
    double u1 = next_double(rng);
    double u2 = next_double(rng);
    while (u1 <= 0.0) u1 = next_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793 * u2);
}

inline std::uint32_t poisson(std::mt19937_64& rng, double lambda) {
    double limit = std::exp(-lambda);
    double p = 1.0;
    std::uint32_t k = 0;
    do {
        ++k;
        p *= next_double(rng);
    } while (p > limit);
    return k - 1;
}

}  // namespace hybrid
