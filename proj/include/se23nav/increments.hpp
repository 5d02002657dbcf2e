// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <algorithm>
#include <span>
#include <string_view>

#include "se23nav/earth_models.hpp"
#include "se23nav/imu.hpp"
#include "se23nav/se23_core.hpp"

namespace se23nav {

/// Local discretisation schemes, ordered from coarsest to finest.
enum class SchemeKind {
  kConstantGlobalAccel = 0,   // rotated specific force held over the step
  kZeroOrderHoldBody = 1,     // body rates held over the step, integrated exactly
  kTwoSampleCompensated = 2,  // coning and sculling corrections from two sub-samples
};

[[nodiscard]] inline std::string_view to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::kConstantGlobalAccel: return "constant-global-accel";
    case SchemeKind::kZeroOrderHoldBody: return "zero-order-hold";
    case SchemeKind::kTwoSampleCompensated: return "two-sample";
  }
  return "unknown";
}

[[nodiscard]] inline SchemeKind parse_scheme(std::string_view s) {
  for (auto k : {SchemeKind::kConstantGlobalAccel, SchemeKind::kZeroOrderHoldBody,
                 SchemeKind::kTwoSampleCompensated}) {
    if (s == to_string(k)) return k;
  }
  throw PreconditionError("unknown scheme '" + std::string(s) + "'");
}

/// Body-frame increment over [t_i, t_j]: the IMU-only factor of the state
/// update.
struct LocalIncrement {
  Mat3 rot = Mat3::Identity();
  Vec3 vel = Vec3::Zero();
  Vec3 pos = Vec3::Zero();
  double dt = 0.0;
  SchemeKind scheme = SchemeKind::kZeroOrderHoldBody;

  [[nodiscard]] static LocalIncrement identity(SchemeKind s = SchemeKind::kZeroOrderHoldBody) {
    return {Mat3::Identity(), Vec3::Zero(), Vec3::Zero(), 0.0, s};
  }
  [[nodiscard]] ExtendedPose pose() const { return {rot, vel, pos}; }
};

/// Frame-side increment over [t_i, t_j]: earth rate and gravitation only.
struct GlobalIncrement {
  Mat3 rot = Mat3::Identity();
  Vec3 vel = Vec3::Zero();
  Vec3 pos = Vec3::Zero();
  double dt = 0.0;
  FrameVariant variant = FrameVariant::kTransformedEcef;

  [[nodiscard]] static GlobalIncrement identity(FrameVariant v) {
    return {Mat3::Identity(), Vec3::Zero(), Vec3::Zero(), 0.0, v};
  }
  [[nodiscard]] ExtendedPose pose() const { return {rot, vel, pos}; }
};

/// @brief Closed-form global increment for frame rate and gravitation held
/// constant over dt.
[[nodiscard]] inline GlobalIncrement global_step(const KinematicContext& ctx, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("global_step requires dt > 0");
  const Vec3 phi = -ctx.frame_rate * dt;
  const Mat3 g1 = gamma<1>(phi);
  // Position slot is the integral of u Exp(phi u / dt) du over [0, dt], which
  // equals (Gamma_1 - Gamma_2)(phi) dt^2.
  return {gamma<0>(phi), g1 * ctx.gravitation * dt, (g1 - gamma<2>(phi)) * ctx.gravitation * (dt * dt), dt,
          ctx.variant};
}

[[nodiscard]] inline GlobalIncrement global_step_ecef(const KinematicContext& ctx, double dt) {
  if (is_ned_family(ctx.variant)) throw VariantMismatchError("global_step_ecef called with a NED context");
  return global_step(ctx, dt);
}

[[nodiscard]] inline GlobalIncrement global_step_ned(const KinematicContext& ctx, double dt) {
  if (!is_ned_family(ctx.variant)) throw VariantMismatchError("global_step_ned called with an ECEF context");
  return global_step(ctx, dt);
}

/// @brief Gamma_ij = Gamma_later * Phi_{dt_later}(Gamma_earlier).
[[nodiscard]] inline GlobalIncrement compose_global(const GlobalIncrement& later, const GlobalIncrement& earlier) {
  if (later.variant != earlier.variant) throw VariantMismatchError("compose_global across frame variants");
  const ExtendedPose p = later.pose() * phi_auto(later.dt, earlier.pose());
  return {p.rot, p.vel, p.pos, later.dt + earlier.dt, later.variant};
}

/// @brief Global increment with the velocity slot shifted by -w_ie x r_t, as
/// used by the untransformed variants.
[[nodiscard]] inline GlobalIncrement gamma_prime(const GlobalIncrement& g, const Vec3& earth_rate, const Vec3& r_t) {
  if (is_transformed(g.variant)) throw VariantMismatchError("gamma_prime applies to untransformed variants only");
  GlobalIncrement out = g;
  out.vel -= earth_rate.cross(r_t);
  return out;
}

/// @brief One-sample local increment. The bias is removed before
/// discretisation.
[[nodiscard]] inline LocalIncrement local_step(SchemeKind scheme, const ImuSample& raw, const ImuBias& bias = {}) {
  raw.validate();
  const ImuSample s = raw.corrected(bias);
  const double dt = s.dt;
  const Vec3 dtheta = s.delta_theta();
  const Vec3 dv = s.delta_v();
  switch (scheme) {
    case SchemeKind::kConstantGlobalAccel:
      return {so3_exp(dtheta), dv, 0.5 * dv * dt, dt, scheme};
    case SchemeKind::kZeroOrderHoldBody:
      return {gamma<0>(dtheta), gamma<1>(dtheta) * dv, gamma<2>(dtheta) * dv * dt, dt, scheme};
    case SchemeKind::kTwoSampleCompensated: {
      if (!s.sub) throw PreconditionError("two-sample scheme requires half-interval sub-increments");
      const SubIncrements& h = *s.sub;
      const Vec3 phi = dtheta + (2.0 / 3.0) * h.dtheta1.cross(h.dtheta2);
      const Vec3 dv_comp =
          dv + 0.5 * dtheta.cross(dv) + (2.0 / 3.0) * (h.dtheta1.cross(h.dv2) + h.dv1.cross(h.dtheta2));
      return {gamma<0>(phi), dv_comp, 0.5 * dv_comp * dt, dt, scheme};
    }
  }
  throw PreconditionError("unknown scheme");
}

/// @brief Upsilon_ij = Phi_{dt_later}(Upsilon_earlier) * Upsilon_later.
[[nodiscard]] inline LocalIncrement compose_local(const LocalIncrement& earlier, const LocalIncrement& later) {
  const ExtendedPose p = phi_auto(later.dt, earlier.pose()) * later.pose();
  SchemeKind tag = std::min(earlier.scheme, later.scheme);
  if (earlier.dt == 0.0) tag = later.scheme;
  if (later.dt == 0.0) tag = earlier.scheme;
  return {p.rot, p.vel, p.pos, earlier.dt + later.dt, tag};
}

/// @brief Local increment embedded with a clock row so that composition
/// becomes a plain matrix product.
[[nodiscard]] inline Mat5 with_clock(const LocalIncrement& u) {
  Mat5 m = u.pose().matrix();
  m(3, 4) = u.dt;
  return m;
}

/// @brief Fold of local_step over a sample window.
[[nodiscard]] inline LocalIncrement preintegrate_window(std::span<const ImuSample> samples, SchemeKind scheme,
                                                        const ImuBias& bias = {}) {
  LocalIncrement acc = LocalIncrement::identity(scheme);
  for (const auto& s : samples) acc = compose_local(acc, local_step(scheme, s, bias));
  return acc;
}

}  // namespace se23nav
