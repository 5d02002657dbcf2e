// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <span>

#include "se23nav/increments.hpp"
#include "se23nav/propagation.hpp"

namespace se23nav {

/// d(Upsilon_ij)/d(bias) at a linearisation bias, as a right perturbation.
struct BiasJacobian {
  Mat96 matrix = Mat96::Zero();
  ImuBias linearization;
};

/// @brief J <- A J + G for one step.
[[nodiscard]] inline BiasJacobian bias_jacobian_step(const BiasJacobian& prev, const TransitionMatrix& a,
                                                     const Mat96& g) {
  if (a.side != PerturbationSide::kRightLocal) throw VariantMismatchError("bias Jacobian needs right-side A");
  return {a.matrix * prev.matrix + g, prev.linearization};
}

/// @brief Recursive bias Jacobian of a whole window.
[[nodiscard]] inline BiasJacobian bias_jacobian_recursive(std::span<const ImuSample> samples, const ImuBias& b_bar) {
  BiasJacobian j{Mat96::Zero(), b_bar};
  for (const auto& s : samples) {
    const LocalIncrement step = local_step(SchemeKind::kZeroOrderHoldBody, s, b_bar);
    j = bias_jacobian_step(j, transition_right(step), noise_jacobian(s, b_bar));
  }
  return j;
}

/// @brief Bias Jacobian as explicit sums over the window. Partial sums are
/// accumulated in the window-start frame and rotated once at the end.
[[nodiscard]] inline BiasJacobian bias_jacobian_closed_form(std::span<const ImuSample> samples,
                                                            const ImuBias& b_bar) {
  Mat3 f_ik = Mat3::Identity();  // rotation from window start to step k
  Mat3 s_rot_g = Mat3::Zero();   // sum F(i,k+1) Gamma_1(-phi_k) dt
  Mat3 s_vel_g = Mat3::Zero();
  Mat3 s_vel_a = Mat3::Zero();
  Mat3 s_pos_g = Mat3::Zero();
  Mat3 s_pos_a = Mat3::Zero();
  for (const auto& raw : samples) {
    raw.validate();
    const ImuSample s = raw.corrected(b_bar);
    const double dt = s.dt;
    const Vec3 phi = s.delta_theta();
    const Vec3 f = s.specific_force();
    const Mat3 g0 = gamma<0>(phi);
    const Mat3 g1 = gamma<1>(phi);
    const Mat3 g2 = gamma<2>(phi);
    // Window-[i,k] Jacobians expressed in the k frame.
    const Mat3 fik_t = f_ik.transpose();
    const Mat3 d_rot_g = -fik_t * s_rot_g;
    const Mat3 d_vel_g = fik_t * s_vel_g;
    const Mat3 d_vel_a = fik_t * s_vel_a;
    const Vec3 vel_step = g1 * f * dt;
    const Vec3 pos_step = g2 * f * (dt * dt);

    s_pos_g += f_ik * (-skew(pos_step) * d_rot_g + dt * d_vel_g - gamma_directional_jacobian(2, phi, f) * (dt * dt * dt));
    s_pos_a += f_ik * (dt * d_vel_a - g2 * (dt * dt));
    s_vel_g += f_ik * (-skew(vel_step) * d_rot_g - gamma_directional_jacobian(1, phi, f) * (dt * dt));
    s_vel_a += f_ik * (-g1 * dt);
    f_ik = f_ik * g0;
    s_rot_g += f_ik * gamma<1>(Vec3(-phi)) * dt;
  }
  const Mat3 fij_t = f_ik.transpose();
  BiasJacobian j{Mat96::Zero(), b_bar};
  j.matrix.block<3, 3>(0, 0) = -fij_t * s_rot_g;
  j.matrix.block<3, 3>(3, 0) = fij_t * s_vel_g;
  j.matrix.block<3, 3>(3, 3) = fij_t * s_vel_a;
  j.matrix.block<3, 3>(6, 0) = fij_t * s_pos_g;
  j.matrix.block<3, 3>(6, 3) = fij_t * s_pos_a;
  return j;
}

/// @brief First-order bias correction Upsilon(b_bar + db) ~ Upsilon exp(J db).
[[nodiscard]] inline LocalIncrement apply_bias_correction(const LocalIncrement& u, const BiasJacobian& j,
                                                          const Vec6& delta_b) {
  const ExtendedPose p = u.pose() * exp_se23(Vec9(j.matrix * delta_b));
  return {p.rot, p.vel, p.pos, u.dt, u.scheme};
}

}  // namespace se23nav
