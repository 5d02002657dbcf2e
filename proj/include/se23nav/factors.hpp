// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <span>

#include "se23nav/bias_update.hpp"
#include "se23nav/increments.hpp"
#include "se23nav/propagation.hpp"

namespace se23nav {

/// Preintegrated IMU constraint between two states.
struct PreintegrationFactor {
  double t_i = 0.0;
  double t_j = 0.0;
  FrameVariant variant = FrameVariant::kTransformedEcef;
  LocalIncrement increment;  // at the linearisation bias
  Covariance9 covariance;    // right side of the increment
  BiasJacobian bias_jacobian;
  GlobalIncrement global;
};

/// Accumulates increment, covariance and bias Jacobian sample by sample.
class Preintegrator {
 public:
  Preintegrator(SchemeKind scheme, const ImuBias& b_bar, const NoiseParams& noise)
      : scheme_(scheme), noise_(noise), increment_(LocalIncrement::identity(scheme)) {
    jacobian_.linearization = b_bar;
  }

  void integrate(const ImuSample& s) {
    const ImuBias& b = jacobian_.linearization;
    const LocalIncrement step = local_step(scheme_, s, b);
    const TransitionMatrix a = transition_right(step);
    const Mat96 g = noise_jacobian(s, b);
    covariance_ = propagate_cov(covariance_, a, g, noise_.discrete_covariance(s.dt));
    jacobian_ = bias_jacobian_step(jacobian_, a, g);
    increment_ = compose_local(increment_, step);
  }

  [[nodiscard]] const LocalIncrement& increment() const { return increment_; }
  [[nodiscard]] const Covariance9& covariance() const { return covariance_; }
  [[nodiscard]] const BiasJacobian& bias_jacobian() const { return jacobian_; }

  [[nodiscard]] PreintegrationFactor factor(double t_i, const GlobalIncrement& global) const {
    if (std::abs(global.dt - increment_.dt) > 1e-9 * std::max(1.0, increment_.dt)) {
      throw PreconditionError("global increment does not span the preintegrated interval");
    }
    return {t_i, t_i + increment_.dt, global.variant, increment_, covariance_, jacobian_, global};
  }

 private:
  SchemeKind scheme_;
  NoiseParams noise_;
  LocalIncrement increment_;
  Covariance9 covariance_;
  BiasJacobian jacobian_;
};

/// Residual jacobians either drop the SE_2(3) Jacobian weighting or keep it.
enum class JacobianMode { kSimplified, kExact };

namespace detail {

inline void check_states(const PreintegrationFactor& f, const NavState& ti, const NavState& tj) {
  if (ti.variant != f.variant || tj.variant != f.variant) {
    throw VariantMismatchError("states and factor use different frame variants");
  }
}

// Right perturbation of an untransformed state expressed on its auxiliary pose.
inline Mat9 auxiliary_chart_map(const EarthModel& earth, const NavState& s) {
  Mat9 m = Mat9::Identity();
  if (!is_transformed(s.variant)) {
    const Mat3& c = s.pose.rot;
    m.block<3, 3>(3, 6) = c.transpose() * skew(frame_earth_rate(earth, s)) * c;
  }
  return m;
}

inline ExtendedPose corrected_prediction(const PreintegrationFactor& f, const Vec6& delta_b) {
  return apply_bias_correction(f.increment, f.bias_jacobian, delta_b).pose();
}

}  // namespace detail

/// @brief r = Log(Upsilon_hat(b)^-1 Upsilon_ij), assembled block-wise.
[[nodiscard]] inline Vec9 residual(const PreintegrationFactor& f, const NavState& ti, const NavState& tj,
                                   const Vec6& delta_b, const EarthModel& earth = EarthModel{}) {
  detail::check_states(f, ti, tj);
  const LocalIncrement meas = extract_local_increment(earth, ti, tj, f.global);
  const ExtendedPose pred = detail::corrected_prediction(f, delta_b);
  const Mat3 pred_t = pred.rot.transpose();
  const Vec3 r_rot = so3_log(pred_t * meas.rot);
  const Mat3 jac_inv = gamma<1>(r_rot).inverse();
  Vec9 r;
  r << r_rot, jac_inv * pred_t * (meas.vel - pred.vel), jac_inv * pred_t * (meas.pos - pred.pos);
  return r;
}

/// @brief d r / d xi_i for the right perturbation T_i exp(xi_i).
[[nodiscard]] inline Mat9 jacobian_wrt_ti(const PreintegrationFactor& f, const NavState& ti, const NavState& tj,
                                          const Vec6& delta_b, JacobianMode mode = JacobianMode::kSimplified,
                                          const EarthModel& earth = EarthModel{}) {
  detail::check_states(f, ti, tj);
  const LocalIncrement meas = extract_local_increment(earth, ti, tj, f.global);
  const Mat3 ct = meas.rot.transpose();
  Mat9 j = Mat9::Zero();
  j.block<3, 3>(0, 0) = -ct;
  j.block<3, 3>(3, 0) = ct * skew(meas.vel);
  j.block<3, 3>(3, 3) = -ct;
  j.block<3, 3>(6, 0) = ct * skew(meas.pos);
  j.block<3, 3>(6, 3) = -meas.dt * ct;
  j.block<3, 3>(6, 6) = -ct;
  if (mode == JacobianMode::kExact) {
    const Vec9 r = residual(f, ti, tj, delta_b, earth);
    j = right_jacobian_inverse_se23(Tangent9::from_vector(r)) * j;
  }
  return j * detail::auxiliary_chart_map(earth, ti);
}

/// @brief d r / d xi_j for the right perturbation T_j exp(xi_j).
[[nodiscard]] inline Mat9 jacobian_wrt_tj(const PreintegrationFactor& f, const NavState& ti, const NavState& tj,
                                          const Vec6& delta_b, JacobianMode mode = JacobianMode::kSimplified,
                                          const EarthModel& earth = EarthModel{}) {
  detail::check_states(f, ti, tj);
  Mat9 j = Mat9::Identity();
  if (mode == JacobianMode::kExact) {
    j = right_jacobian_inverse_se23(Tangent9::from_vector(residual(f, ti, tj, delta_b, earth)));
  }
  return j * detail::auxiliary_chart_map(earth, tj);
}

/// @brief d r / d(delta_b). Simplified mode returns -J_bias.
[[nodiscard]] inline Mat96 jacobian_wrt_bias(const PreintegrationFactor& f, const NavState& ti, const NavState& tj,
                                             const Vec6& delta_b, JacobianMode mode = JacobianMode::kSimplified,
                                             const EarthModel& earth = EarthModel{}) {
  detail::check_states(f, ti, tj);
  const Mat96& jb = f.bias_jacobian.matrix;
  if (mode == JacobianMode::kSimplified) return -jb;
  const Vec9 r = residual(f, ti, tj, delta_b, earth);
  const Tangent9 x = Tangent9::from_vector(jb * delta_b);
  return -left_jacobian_inverse_se23(Tangent9::from_vector(r)) * right_jacobian_se23(x) * jb;
}

}  // namespace se23nav
