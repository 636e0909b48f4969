#ifndef TNK_RNG_HPP
#define TNK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tnk {

/// Counter-based random number generation. Every variate is a pure function
/// of its key, so parallel and serial evaluation orders produce identical
/// streams. The mixer is the splitmix64 finalizer applied to the combined key.
namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

/// Uniform in (0,1), never exactly 0 or 1.
inline double uniform01(std::uint64_t k) {
    return (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform in (-1,1).
inline double uniform_pm1(std::uint64_t k) { return 2.0 * uniform01(k) - 1.0; }

/// Standard normal via Box-Muller on two sub-streams of the key.
inline double normal(std::uint64_t k) {
    const double u1 = uniform01(mix64(k ^ 0x243f6a8885a308d3ULL));
    const double u2 = uniform01(mix64(k ^ 0x13198a2e03707344ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng
}  // namespace tnk

#endif
