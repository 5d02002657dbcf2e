// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "se23nav/imu.hpp"
#include "se23nav/se23_core.hpp"

namespace se23nav {

/// Navigation frame and velocity convention of a state.
///  kNed / kEcef: velocity relative to the earth.
///  kTransformedNed / kTransformedEcef: auxiliary velocity v + w_ie x r.
enum class FrameVariant { kNed, kTransformedNed, kEcef, kTransformedEcef };

[[nodiscard]] constexpr bool is_ned_family(FrameVariant v) {
  return v == FrameVariant::kNed || v == FrameVariant::kTransformedNed;
}
[[nodiscard]] constexpr bool is_transformed(FrameVariant v) {
  return v == FrameVariant::kTransformedNed || v == FrameVariant::kTransformedEcef;
}

[[nodiscard]] inline std::string_view to_string(FrameVariant v) {
  switch (v) {
    case FrameVariant::kNed: return "ned";
    case FrameVariant::kTransformedNed: return "transformed-ned";
    case FrameVariant::kEcef: return "ecef";
    case FrameVariant::kTransformedEcef: return "transformed-ecef";
  }
  return "unknown";
}

[[nodiscard]] inline FrameVariant parse_frame_variant(std::string_view s) {
  for (auto v : {FrameVariant::kNed, FrameVariant::kTransformedNed, FrameVariant::kEcef,
                 FrameVariant::kTransformedEcef}) {
    if (s == to_string(v)) return v;
  }
  throw PreconditionError("unknown frame variant '" + std::string(s) + "'");
}

/// Geodetic latitude and longitude in radians, ellipsoidal height in metres.
struct GeodeticPosition {
  double lat = 0.0;
  double lon = 0.0;
  double height = 0.0;

  void validate() const {
    if (!std::isfinite(lat) || !std::isfinite(lon) || !std::isfinite(height) ||
        std::abs(lat) > 0.5 * std::numbers::pi) {
      throw PreconditionError("geodetic position out of range");
    }
  }
};

/// Ellipsoid, rotation and normal-gravity constants.
struct EarthParams {
  double omega_ie = 7.2921151467e-5;        // rad/s
  double semi_major_axis = 6378137.0;       // m
  double flattening = 1.0 / 298.257223563;
  double equatorial_gravity = 9.7803253359;  // m/s^2
  double polar_gravity = 9.8321849378;       // m/s^2
  double gm = 3.986004418e14;                // m^3/s^2

  [[nodiscard]] static EarthParams wgs84() { return {}; }
  [[nodiscard]] double ecc_sq() const { return flattening * (2.0 - flattening); }
  [[nodiscard]] double semi_minor_axis() const { return semi_major_axis * (1.0 - flattening); }
};

/// Rotating ellipsoidal earth with Somigliana normal gravity.
class EarthModel {
 public:
  explicit EarthModel(EarthParams params = EarthParams::wgs84()) : p_(params) {}

  [[nodiscard]] const EarthParams& params() const { return p_; }

  [[nodiscard]] double meridian_radius(double lat) const {
    const double s = std::sin(lat);
    const double d = 1.0 - p_.ecc_sq() * s * s;
    return p_.semi_major_axis * (1.0 - p_.ecc_sq()) / (d * std::sqrt(d));
  }
  [[nodiscard]] double transverse_radius(double lat) const {
    const double s = std::sin(lat);
    return p_.semi_major_axis / std::sqrt(1.0 - p_.ecc_sq() * s * s);
  }

  [[nodiscard]] Vec3 earth_rate_e() const { return {0.0, 0.0, p_.omega_ie}; }

  [[nodiscard]] Vec3 earth_rate_n(const GeodeticPosition& pos) const {
    pos.validate();
    return {p_.omega_ie * std::cos(pos.lat), 0.0, -p_.omega_ie * std::sin(pos.lat)};
  }

  /// @brief Rotation rate of the local-level frame relative to the earth.
  [[nodiscard]] Vec3 transport_rate_n(const GeodeticPosition& pos, const Vec3& v_ned) const {
    pos.validate();
    if (0.5 * std::numbers::pi - std::abs(pos.lat) < 1e-6) {
      throw PolarSingularityError("transport rate undefined within 1e-6 rad of a pole");
    }
    const double rn = transverse_radius(pos.lat) + pos.height;
    const double rm = meridian_radius(pos.lat) + pos.height;
    return {v_ned.y() / rn, -v_ned.x() / rm, -v_ned.y() * std::tan(pos.lat) / rn};
  }

  /// @brief Time derivatives of (lat, lon, height).
  [[nodiscard]] Vec3 geodetic_rates(const GeodeticPosition& pos, const Vec3& v_ned) const {
    if (0.5 * std::numbers::pi - std::abs(pos.lat) < 1e-6) {
      throw PolarSingularityError("longitude rate undefined within 1e-6 rad of a pole");
    }
    const double rn = transverse_radius(pos.lat) + pos.height;
    const double rm = meridian_radius(pos.lat) + pos.height;
    return {v_ned.x() / rm, v_ned.y() / (rn * std::cos(pos.lat)), -v_ned.z()};
  }

  /// @brief Magnitude of normal gravity with a second-order height correction.
  [[nodiscard]] double normal_gravity(double lat, double height) const {
    const double a = p_.semi_major_axis;
    const double b = p_.semi_minor_axis();
    const double e2 = p_.ecc_sq();
    const double s2 = std::sin(lat) * std::sin(lat);
    const double k = (b * p_.polar_gravity - a * p_.equatorial_gravity) / (a * p_.equatorial_gravity);
    const double g0 = p_.equatorial_gravity * (1.0 + k * s2) / std::sqrt(1.0 - e2 * s2);
    const double m = p_.omega_ie * p_.omega_ie * a * a * b / p_.gm;
    const double f = p_.flattening;
    return g0 * (1.0 - 2.0 / a * (1.0 + f + m - 2.0 * f * s2) * height + 3.0 * height * height / (a * a));
  }

  /// @brief Gravity (gravitation plus centrifugal) resolved in NED.
  [[nodiscard]] Vec3 gravity_n(const GeodeticPosition& pos) const {
    return {0.0, 0.0, normal_gravity(pos.lat, pos.height)};
  }

  [[nodiscard]] Vec3 gravity_e(const Vec3& r_e) const {
    const GeodeticPosition pos = to_geodetic(r_e);
    return ned_to_ecef(pos) * gravity_n(pos);
  }

  /// @brief C_n^e, rotating NED components into ECEF.
  [[nodiscard]] Mat3 ned_to_ecef(const GeodeticPosition& pos) const {
    const double sl = std::sin(pos.lat), cl = std::cos(pos.lat);
    const double so = std::sin(pos.lon), co = std::cos(pos.lon);
    Mat3 c;
    c << -sl * co, -so, -cl * co,
         -sl * so, co, -cl * so,
         cl, 0.0, -sl;
    return c;
  }

  [[nodiscard]] Vec3 to_ecef(const GeodeticPosition& pos) const {
    pos.validate();
    const double rn = transverse_radius(pos.lat);
    const double cl = std::cos(pos.lat);
    return {(rn + pos.height) * cl * std::cos(pos.lon), (rn + pos.height) * cl * std::sin(pos.lon),
            (rn * (1.0 - p_.ecc_sq()) + pos.height) * std::sin(pos.lat)};
  }

  [[nodiscard]] GeodeticPosition to_geodetic(const Vec3& r_e) const {
    const double e2 = p_.ecc_sq();
    const double p = std::hypot(r_e.x(), r_e.y());
    double lat = std::atan2(r_e.z(), p * (1.0 - e2));
    double height = 0.0;
    for (int it = 0; it < 30; ++it) {
      const double s = std::sin(lat);
      const double rn = transverse_radius(lat);
      height = p * std::cos(lat) + r_e.z() * s - p_.semi_major_axis * std::sqrt(1.0 - e2 * s * s);
      const double next = std::atan2(r_e.z(), p * (1.0 - e2 * rn / (rn + height)));
      const bool done = std::abs(next - lat) < 1e-15;
      lat = next;
      if (done) break;
    }
    const double s = std::sin(lat);
    height = p * std::cos(lat) + r_e.z() * s - p_.semi_major_axis * std::sqrt(1.0 - e2 * s * s);
    return {lat, std::atan2(r_e.y(), r_e.x()), height};
  }

  /// @brief Earth-centred position resolved in the local NED axes.
  [[nodiscard]] Vec3 position_n(const GeodeticPosition& pos) const {
    return ned_to_ecef(pos).transpose() * to_ecef(pos);
  }

 private:
  EarthParams p_;
};

/// @brief Gravitation from gravity: G = g + w x (w x r).
[[nodiscard]] inline Vec3 gravitation_from_gravity(const Vec3& g, const Vec3& omega, const Vec3& r) {
  return g + omega.cross(omega.cross(r));
}
[[nodiscard]] inline Vec3 gravity_from_gravitation(const Vec3& big_g, const Vec3& omega, const Vec3& r) {
  return big_g - omega.cross(omega.cross(r));
}

/// Rates and forcing held constant over one propagation interval.
struct KinematicContext {
  FrameVariant variant = FrameVariant::kTransformedEcef;
  Vec3 frame_rate = Vec3::Zero();   // w_in^n (NED family) or w_ie^e (ECEF family)
  Vec3 earth_rate = Vec3::Zero();   // w_ie resolved in the frame axes
  Vec3 gravitation = Vec3::Zero();  // G
  Vec3 gravity = Vec3::Zero();      // g
  // Untransformed variants: state-dependent terms frozen at the reference state.
  Vec3 reference_velocity = Vec3::Zero();  // earth-relative v
  Vec3 velocity_coupling = Vec3::Zero();   // g - w_ie x v
  Vec3 position_coupling = Vec3::Zero();   // w_ie x r
};

/// @brief Context evaluated at a reference pose. The anchor fixes the NED
/// frame and is ignored for the ECEF family.
[[nodiscard]] inline KinematicContext kinematic_context(const EarthModel& earth, FrameVariant variant,
                                                        const ExtendedPose& pose,
                                                        const GeodeticPosition& anchor = {}) {
  KinematicContext ctx;
  ctx.variant = variant;
  const Vec3& r = pose.pos;
  if (is_ned_family(variant)) {
    ctx.earth_rate = earth.earth_rate_n(anchor);
    ctx.gravity = earth.gravity_n(anchor);
  } else {
    ctx.earth_rate = earth.earth_rate_e();
    ctx.gravity = earth.gravity_e(r);
  }
  const Vec3 v_earth = is_transformed(variant) ? Vec3(pose.vel - ctx.earth_rate.cross(r)) : pose.vel;
  ctx.frame_rate = is_ned_family(variant) ? Vec3(ctx.earth_rate + earth.transport_rate_n(anchor, v_earth))
                                          : ctx.earth_rate;
  ctx.gravitation = gravitation_from_gravity(ctx.gravity, ctx.earth_rate, r);
  ctx.reference_velocity = v_earth;
  ctx.velocity_coupling = ctx.gravity - ctx.earth_rate.cross(v_earth);
  ctx.position_coupling = ctx.earth_rate.cross(r);
  return ctx;
}

/// @brief Frame dynamics X' = f(X) as a 5x5 matrix for constant body rates.
/// Transformed variants use the exact state-dependent field; untransformed
/// variants use the factorisation with coupling terms frozen in ctx.
[[nodiscard]] inline Mat5 vector_field(const KinematicContext& ctx, const ImuSample& imu, const ExtendedPose& x) {
  Mat5 body = Mat5::Zero();
  body.block<3, 3>(0, 0) = skew(imu.angular_rate());
  body.block<3, 1>(0, 3) = imu.specific_force();
  Mat5 frame = Mat5::Zero();
  frame.block<3, 3>(0, 0) = -skew(ctx.frame_rate);
  const Mat5 xm = x.matrix();
  Mat5 out;
  if (is_transformed(ctx.variant)) {
    frame.block<3, 1>(0, 3) = ctx.gravitation;
    out = xm * body + frame * xm;
    out.block<3, 1>(0, 4) += x.vel;
  } else {
    frame.block<3, 1>(0, 3) = ctx.velocity_coupling;
    frame.block<3, 1>(0, 4) = ctx.reference_velocity + ctx.position_coupling;
    out = xm * body + frame * xm;
  }
  return out;
}

/// @brief Frobenius norm of f(A)B + A f(B) - A f(I) B - f(AB).
[[nodiscard]] inline double group_affine_defect(const KinematicContext& ctx, const ImuSample& imu,
                                                const ExtendedPose& a, const ExtendedPose& b) {
  const Mat5 am = a.matrix();
  const Mat5 bm = b.matrix();
  const Mat5 d = vector_field(ctx, imu, a) * bm + am * vector_field(ctx, imu, b) -
                 am * vector_field(ctx, imu, ExtendedPose::identity()) * bm - vector_field(ctx, imu, a * b);
  return d.norm();
}

}  // namespace se23nav
