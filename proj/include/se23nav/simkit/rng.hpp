// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace se23nav::simkit {

/// Counter-based generator: draw n of stream s is splitmix64(key(seed, s) + n * golden),
/// a pure function of (seed, stream, counter). Gaussians use the Box-Muller
/// cosine branch on two consecutive uniforms in (0, 1].
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  [[nodiscard]] std::uint64_t next_u64() { return mix(key_ + (counter_++) * kGolden); }

  /// Uniform in (0, 1].
  [[nodiscard]] double uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  [[nodiscard]] double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace se23nav::simkit
