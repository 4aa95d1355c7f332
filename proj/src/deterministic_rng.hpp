#pragma once

#include <cmath>
#include <random>

namespace chebrec::detail {

/// Uniform double in [0,1) from the top 53 bits of the engine output.
/// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on deterministic uniforms.
inline double normal01(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

}  // namespace chebrec::detail
