// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <Eigen/Eigenvalues>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "se23nav/earth_models.hpp"
#include "se23nav/imu.hpp"
#include "se23nav/increments.hpp"

namespace se23nav {

/// Navigation state in one frame variant. For the NED family the anchor is
/// the geodetic position that defines the local-level axes.
struct NavState {
  ExtendedPose pose;
  FrameVariant variant = FrameVariant::kTransformedEcef;
  double epoch = 0.0;
  ImuBias bias;
  GeodeticPosition anchor;
};

/// @brief Earth rate resolved in the state's frame axes.
[[nodiscard]] inline Vec3 frame_earth_rate(const EarthModel& earth, const NavState& s) {
  return is_ned_family(s.variant) ? earth.earth_rate_n(s.anchor) : earth.earth_rate_e();
}

/// @brief Pose with the auxiliary velocity v + w_ie x r; identity map for
/// the transformed variants.
[[nodiscard]] inline ExtendedPose auxiliary_pose(const EarthModel& earth, const NavState& s) {
  if (is_transformed(s.variant)) return s.pose;
  ExtendedPose p = s.pose;
  p.vel += frame_earth_rate(earth, s).cross(p.pos);
  return p;
}

/// @brief Earth-relative velocity of a state in any variant.
[[nodiscard]] inline Vec3 earth_relative_velocity(const EarthModel& earth, const NavState& s) {
  if (!is_transformed(s.variant)) return s.pose.vel;
  return s.pose.vel - frame_earth_rate(earth, s).cross(s.pose.pos);
}

[[nodiscard]] inline KinematicContext kinematic_context(const EarthModel& earth, const NavState& s) {
  return kinematic_context(earth, s.variant, s.pose, s.anchor);
}

namespace detail {

inline GeodeticPosition advance_anchor(const GeodeticPosition& a, const Vec3& rates, double dt) {
  return {a.lat + rates.x() * dt, a.lon + rates.y() * dt, a.height + rates.z() * dt};
}

}  // namespace detail

/// @brief T_j = Gamma_ij Phi_dt(T_i) Upsilon_ij on the auxiliary pose.
/// Untransformed states are shifted to the auxiliary velocity and back, and
/// the NED anchor follows the geodetic rates with a trapezoidal step.
[[nodiscard]] inline NavState propagate_state(const EarthModel& earth, const NavState& ti,
                                              const GlobalIncrement& g, const LocalIncrement& u) {
  if (g.variant != ti.variant) throw VariantMismatchError("global increment and state use different variants");
  if (std::abs(g.dt - u.dt) > 1e-9 * std::max(1.0, u.dt)) {
    throw PreconditionError("global and local increments span different intervals");
  }
  const ExtendedPose start = phi_auto(u.dt, auxiliary_pose(earth, ti));
  ExtendedPose aux = g.pose() * start * u.pose();
  // Earth-centred positions are ~1e7 m, so rebuild the position slot as a
  // small displacement added once; the plain product rounds with a bias.
  const Vec3 rot_g = so3_log(g.rot);
  const Vec3 p0 = ti.pose.pos;
  const Vec3 cross1 = rot_g.cross(p0);
  const double theta = rot_g.norm();
  const Vec3 rotate_minus_p0 =
      detail::gamma_coeff(1, theta) * cross1 + detail::gamma_coeff(2, theta) * rot_g.cross(cross1);
  aux.pos = p0 + (g.pos + rotate_minus_p0 + g.rot * ((start.pos - p0) + start.rot * u.pos));
  NavState tj = ti;
  tj.pose = aux;
  tj.epoch = ti.epoch + u.dt;
  if (is_ned_family(ti.variant)) {
    const Vec3 v_start = earth_relative_velocity(earth, ti);
    const Vec3 rate_start = earth.geodetic_rates(ti.anchor, v_start);
    tj.anchor = detail::advance_anchor(ti.anchor, rate_start, u.dt);
    for (int it = 0; it < 2; ++it) {
      const Vec3 v_end = aux.vel - earth.earth_rate_n(tj.anchor).cross(aux.pos);
      const Vec3 rate_end = earth.geodetic_rates(tj.anchor, v_end);
      tj.anchor = detail::advance_anchor(ti.anchor, 0.5 * (rate_start + rate_end), u.dt);
    }
  }
  if (!is_transformed(ti.variant)) tj.pose.vel = aux.vel - frame_earth_rate(earth, tj).cross(aux.pos);
  return tj;
}

/// How the frame rates and gravitation are held over one interval.
enum class ContextRule {
  kStart,      // evaluated at t_i
  kTrapezoid,  // mean of t_i and a predicted t_j
};

/// @brief Component-wise mean of two contexts of the same variant.
[[nodiscard]] inline KinematicContext mean_context(const KinematicContext& a, const KinematicContext& b) {
  if (a.variant != b.variant) throw VariantMismatchError("mean_context across frame variants");
  KinematicContext m = a;
  m.frame_rate = 0.5 * (a.frame_rate + b.frame_rate);
  m.earth_rate = 0.5 * (a.earth_rate + b.earth_rate);
  m.gravitation = 0.5 * (a.gravitation + b.gravitation);
  m.gravity = 0.5 * (a.gravity + b.gravity);
  m.reference_velocity = 0.5 * (a.reference_velocity + b.reference_velocity);
  m.velocity_coupling = 0.5 * (a.velocity_coupling + b.velocity_coupling);
  m.position_coupling = 0.5 * (a.position_coupling + b.position_coupling);
  return m;
}

/// Propagated state with the global increment that produced it.
struct PropagationStep {
  NavState state;
  GlobalIncrement global;
};

/// @brief One interval of propagation. The trapezoid rule predicts t_j with
/// the start context, then repeats the step with the mean context; this
/// removes the first-order error from rates that drift with the state.
[[nodiscard]] inline PropagationStep propagate_step(const EarthModel& earth, const NavState& ti,
                                                   const LocalIncrement& u,
                                                   ContextRule rule = ContextRule::kTrapezoid) {
  const KinematicContext start = kinematic_context(earth, ti);
  GlobalIncrement g = global_step(start, u.dt);
  NavState tj = propagate_state(earth, ti, g, u);
  if (rule == ContextRule::kTrapezoid) {
    g = global_step(mean_context(start, kinematic_context(earth, tj)), u.dt);
    tj = propagate_state(earth, ti, g, u);
  }
  return {tj, g};
}

/// @brief Upsilon_ij implied by two states and the global increment.
[[nodiscard]] inline LocalIncrement extract_local_increment(const EarthModel& earth, const NavState& ti,
                                                            const NavState& tj, const GlobalIncrement& g,
                                                            SchemeKind tag = SchemeKind::kZeroOrderHoldBody) {
  if (ti.variant != tj.variant || g.variant != ti.variant) {
    throw VariantMismatchError("extract_local_increment across frame variants");
  }
  const ExtendedPose ai = auxiliary_pose(earth, ti);
  const ExtendedPose aj = auxiliary_pose(earth, tj);
  const ExtendedPose u = (g.pose() * phi_auto(g.dt, ai)).inverse() * aj;
  return {u.rot, u.vel, u.pos, g.dt, tag};
}

/// @brief First-order map from rate noise [n_gyro; n_accel] to the right
/// perturbation of the one-step zero-order-hold increment.
[[nodiscard]] inline Mat96 noise_jacobian(const ImuSample& raw, const ImuBias& bias = {}) {
  raw.validate();
  const ImuSample s = raw.corrected(bias);
  const double dt = s.dt;
  const Vec3 phi = s.delta_theta();
  const Vec3 f = s.specific_force();
  const Mat3 rt = gamma<0>(phi).transpose();
  Mat96 g = Mat96::Zero();
  g.block<3, 3>(0, 0) = -rt * gamma<1>(phi) * dt;
  g.block<3, 3>(3, 0) = -rt * gamma_directional_jacobian(1, phi, f) * (dt * dt);
  g.block<3, 3>(3, 3) = -rt * gamma<1>(phi) * dt;
  g.block<3, 3>(6, 0) = -rt * gamma_directional_jacobian(2, phi, f) * (dt * dt * dt);
  g.block<3, 3>(6, 3) = -rt * gamma<2>(phi) * (dt * dt);
  return g;
}

/// Where the 9-dimensional error lives: right of the local increment, or
/// left in the common navigation frame.
enum class PerturbationSide { kRightLocal, kLeftCommonFrame };

[[nodiscard]] inline std::string_view to_string(PerturbationSide s) {
  return s == PerturbationSide::kRightLocal ? "right" : "left";
}

/// Side-tagged 9x9 covariance.
struct Covariance9 {
  Mat9 matrix = Mat9::Zero();
  PerturbationSide side = PerturbationSide::kRightLocal;
};

/// Side-tagged error-state transition.
struct TransitionMatrix {
  Mat9 matrix = Mat9::Identity();
  PerturbationSide side = PerturbationSide::kRightLocal;
};

/// @brief A = Ad(Upsilon^-1) F for the right-side error.
[[nodiscard]] inline TransitionMatrix transition_right(const LocalIncrement& step) {
  return {adjoint(step.pose().inverse()) * AutomorphismF{step.dt}.matrix(), PerturbationSide::kRightLocal};
}

/// @brief A = Ad(Gamma) F for the left-side error; independent of the IMU.
[[nodiscard]] inline TransitionMatrix transition_left(const GlobalIncrement& step) {
  return {adjoint(step.pose()) * AutomorphismF{step.dt}.matrix(), PerturbationSide::kLeftCommonFrame};
}

namespace detail {

inline void validate_noise(const Mat6& q) {
  if (!q.allFinite() || (q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q.norm())) {
    throw NonPsdError("noise covariance must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat6> es(q, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
    throw NonPsdError("noise covariance has a negative eigenvalue");
  }
}

// Symmetrise and clip round-off negative eigenvalues; reject real ones.
inline Mat9 condition_covariance(const Mat9& raw) {
  const Mat9 sym = 0.5 * (raw + raw.transpose());
  if (!sym.allFinite()) throw NonPsdError("covariance contains non-finite entries");
  // Work on the unit-diagonal rescaling: left-side covariances mix entries
  // from 1e-6 to 1e8 and a raw eigen-reconstruction would wipe the small ones.
  Vec9 root = Vec9::Ones();
  if (sym.diagonal().minCoeff() > 0.0) root = sym.diagonal().cwiseSqrt();
  const Vec9 inv_root = root.cwiseInverse();
  const Mat9 scaled = inv_root.asDiagonal() * sym * inv_root.asDiagonal();
  if (Eigen::LLT<Mat9>(scaled).info() == Eigen::Success) return sym;
  Eigen::SelfAdjointEigenSolver<Mat9> es(scaled);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev >= 0.0) return sym;
  if (min_ev < -1e-12 * scale) throw NonPsdError("covariance lost positive semidefiniteness");
  const Vec9 clipped = es.eigenvalues().cwiseMax(0.0);
  const Mat9 fixed = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  return root.asDiagonal() * fixed * root.asDiagonal();
}

}  // namespace detail

/// @brief Noise map as seen by the covariance of the given side: G for the
/// right side, Ad(T_next) G for the left side.
[[nodiscard]] inline Mat96 effective_noise_map(PerturbationSide side, const Mat96& g,
                                               const std::optional<ExtendedPose>& t_next) {
  if (side == PerturbationSide::kRightLocal) return g;
  if (!t_next) throw PreconditionError("left-side propagation needs the propagated auxiliary pose");
  return adjoint(*t_next) * g;
}

/// @brief Sigma' = A Sigma A^T + G' Q G'^T with PSD conditioning.
[[nodiscard]] inline Covariance9 propagate_cov(const Covariance9& sigma, const TransitionMatrix& a, const Mat96& g,
                                               const Mat6& q,
                                               const std::optional<ExtendedPose>& t_next = std::nullopt) {
  if (sigma.side != a.side) throw VariantMismatchError("covariance and transition use different sides");
  detail::validate_noise(q);
  const Mat96 gn = effective_noise_map(sigma.side, g, t_next);
  return {detail::condition_covariance(a.matrix * sigma.matrix * a.matrix.transpose() + gn * q * gn.transpose()),
          sigma.side};
}

/// One step of a batch covariance evaluation.
struct CovarianceStep {
  Mat9 transition = Mat9::Identity();
  Mat96 noise_map = Mat96::Zero();  // already side-adjusted
};

/// @brief Ordered product A_{j-1} ... A_i over steps[i, j); identity when
/// the range is empty.
[[nodiscard]] inline Mat9 transition_product(std::span<const CovarianceStep> steps, std::size_t i, std::size_t j) {
  Mat9 p = Mat9::Identity();
  for (std::size_t k = i; k < j && k < steps.size(); ++k) p = steps[k].transition * p;
  return p;
}

/// @brief Sigma_j as an explicit sum of transported per-step noise terms.
[[nodiscard]] inline Covariance9 batch_covariance(const Covariance9& sigma_i, std::span<const CovarianceStep> steps,
                                                  const Mat6& q) {
  detail::validate_noise(q);
  Mat9 total = Mat9::Zero();
  const std::size_t n = steps.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Matrix<double, 9, 6> m = transition_product(steps, k + 1, n) * steps[k].noise_map;
    total += m * q * m.transpose();
  }
  const Mat9 a_all = transition_product(steps, 0, n);
  total += a_all * sigma_i.matrix * a_all.transpose();
  return {detail::condition_covariance(total), sigma_i.side};
}

/// @brief Re-express a covariance on the other side of the pose.
[[nodiscard]] inline Covariance9 convert_side(const Covariance9& sigma, const ExtendedPose& pose) {
  const Mat9 ad = adjoint(pose);
  if (sigma.side == PerturbationSide::kRightLocal) {
    return {ad * sigma.matrix * ad.transpose(), PerturbationSide::kLeftCommonFrame};
  }
  const Mat9 ad_inv = adjoint(pose.inverse());
  return {ad_inv * sigma.matrix * ad_inv.transpose(), PerturbationSide::kRightLocal};
}

}  // namespace se23nav
