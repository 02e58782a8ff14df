#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "cpgd/types.hpp"

namespace cpgd::rng {

/// All randomness in the library flows through mt19937_64 plus the explicit
/// mappings below, so a seed pins the output bytes regardless of the
/// standard-library version.
using Engine = std::mt19937_64;

/// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Standard normal, Box-Muller.
inline double gaussian(Engine& eng) {
    double u1 = uniform01(eng);
    while (u1 == 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

/// exp(N(0, 1)): log-mean 0, log-std 1.
inline double log_normal(Engine& eng) { return std::exp(gaussian(eng)); }

/// Circularly-symmetric complex gaussian with unit variance.
inline Complex complex_gaussian(Engine& eng) {
    const double scale = 1.0 / std::sqrt(2.0);
    const double re = gaussian(eng);
    const double im = gaussian(eng);
    return {scale * re, scale * im};
}

/// splitmix64 finaliser; decorrelates seeds derived from nearby integers.
inline uint64_t mix(uint64_t state) {
    state += 0x9e3779b97f4a7c15ULL;
    state = (state ^ (state >> 30)) * 0xbf58476d1ce4e5b9ULL;
    state = (state ^ (state >> 27)) * 0x94d049bb133111ebULL;
    return state ^ (state >> 31);
}

/// Independent sub-seed for component `salt` of the run keyed by `base`.
inline uint64_t derive(uint64_t base, uint64_t salt) {
    return mix(base ^ mix(salt));
}

}  // namespace cpgd::rng
