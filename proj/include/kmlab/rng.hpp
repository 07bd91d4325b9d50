#ifndef KMLAB_RNG_HPP
#define KMLAB_RNG_HPP

#include <cstdint>

namespace kmlab {

// Deterministic counter-based randomness. Every consumer derives its values
// as a pure function of (seed, indices), so results never depend on call
// order or thread scheduling.

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Order-sensitive combination of a seed with up to three indices.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t a) {
    return mix64(mix64(seed) ^ a);
}
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(substream(seed, a) ^ b);
}
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) {
    return mix64(substream(seed, a, b) ^ c);
}

/// Uniform double in [0, 1) from a 64-bit stream value.
inline double uniform01(std::uint64_t s) {
    return static_cast<double>(mix64(s) >> 11) * 0x1.0p-53;
}

/// Standard normal deviate, a pure function of the stream value
/// (Box-Muller on two uniforms derived from it).
double standard_normal(std::uint64_t s);

} // namespace kmlab

#endif
