#pragma once

#include <cmath>
#include <numbers>
#include <random>

namespace dsvm {

/// Portable draws on top of std::mt19937_64. The standard fixes the engine's
/// output sequence but not the distributions, so the conversions live here.

/// 53 random mantissa bits mapped to [0, 1).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Box–Muller, cosine branch only. 1 − u keeps the log argument in (0, 1].
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dsvm
