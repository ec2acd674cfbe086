#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ppwg {

/// Uniform double in [0, 1) built directly from the generator output, so the
/// stream does not depend on the standard library's distribution internals.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Poisson sampling with an implementation-defined-free algorithm so that a
// fixed seed yields the same stream on every platform (std::poisson_
// distribution makes no such guarantee). Knuth multiplication, chunked for
// large means; exact distribution, O(mean) draws.
inline std::uint64_t poisson_sample(std::mt19937_64& rng, double mean) {
    std::uint64_t total = 0;
    double remaining = mean;
    constexpr double kChunk = 500.0;
    while (remaining > 0.0) {
        const double m = remaining > kChunk ? kChunk : remaining;
        remaining -= m;
        const double limit = std::exp(-m);
        double prod = 1.0;
        std::uint64_t k = 0;
        do {
            prod *= uniform_unit(rng);
            ++k;
        } while (prod > limit);
        total += k - 1;
    }
    return total;
}

}  // namespace ppwg
