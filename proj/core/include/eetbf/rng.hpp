#ifndef EETBF_RNG_HPP
#define EETBF_RNG_HPP

#include <cstdint>
#include <random>

namespace eetbf {

// All randomness flows through one seeded engine per run. The mappings below
// are hand-rolled instead of <random> distributions so that a given seed
// produces the same stream on every standard library.
using Rng = std::mt19937_64;

/// Uniform draw in [0, 1) with 53-bit resolution.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng &rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [lo, hi], inclusive on both ends.
inline int uniform_int(Rng &rng, int lo, int hi) {
    const int span = hi - lo + 1;
    int k = static_cast<int>(uniform01(rng) * span);
    if (k >= span) k = span - 1;
    return lo + k;
}

} // namespace eetbf

#endif
