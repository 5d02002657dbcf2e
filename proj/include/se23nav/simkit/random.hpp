// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <numbers>

#include "se23nav/se23_core.hpp"
#include "se23nav/simkit/rng.hpp"

namespace se23nav::simkit {

[[nodiscard]] inline Vec3 random_gaussian3(CounterRng& rng, double sigma = 1.0) {
  const double x = rng.gaussian();
  const double y = rng.gaussian();
  const double z = rng.gaussian();
  return sigma * Vec3(x, y, z);
}

/// @brief Uniformly oriented vector with norm uniform in [0, max_norm].
[[nodiscard]] inline Vec3 random_ball3(CounterRng& rng, double max_norm) {
  Vec3 dir = random_gaussian3(rng);
  while (dir.norm() < 1e-12) dir = random_gaussian3(rng);
  return rng.uniform() * max_norm * dir.normalized();
}

/// @brief Pose with a uniformly random rotation below the log branch cut.
[[nodiscard]] inline ExtendedPose random_pose(CounterRng& rng, double translation_scale = 10.0) {
  return {so3_exp(random_ball3(rng, std::numbers::pi - 0.01)), random_gaussian3(rng, translation_scale),
          random_gaussian3(rng, translation_scale)};
}

[[nodiscard]] inline Tangent9 random_tangent(CounterRng& rng, double max_rot, double translation_scale) {
  return {random_ball3(rng, max_rot), random_gaussian3(rng, translation_scale),
          random_gaussian3(rng, translation_scale)};
}

}  // namespace se23nav::simkit
