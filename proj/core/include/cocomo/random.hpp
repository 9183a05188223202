#pragma once

#include <cstdint>
#include <random>

namespace cocomo {

/// The single generator type used for every declared random choice. The
/// mt19937_64 output sequence is fixed by the standard; the conversions below
/// avoid the implementation-defined std:: distributions so traces stay
/// byte-identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) for n > 0, by rejection (one or more draws).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

}  // namespace cocomo
