// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <algorithm>
#include <optional>

#include "se23nav/se23_core.hpp"

namespace se23nav {

/// Additive gyro and accelerometer biases.
struct ImuBias {
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();

  [[nodiscard]] Vec6 vector() const {
    Vec6 out;
    out << gyro, accel;
    return out;
  }
  [[nodiscard]] static ImuBias from_vector(const Vec6& b) { return {b.head<3>(), b.tail<3>()}; }
  [[nodiscard]] ImuBias operator+(const Vec6& delta) const { return from_vector(vector() + delta); }
};

enum class SampleForm { kRate, kIncrement };

/// Half-interval increments used by the two-sample compensated scheme.
struct SubIncrements {
  Vec3 dtheta1 = Vec3::Zero();
  Vec3 dtheta2 = Vec3::Zero();
  Vec3 dv1 = Vec3::Zero();
  Vec3 dv2 = Vec3::Zero();
};

/// One IMU interval. In rate form gyro/accel hold angular rate and specific
/// force; in increment form they hold the integrals over dt.
struct ImuSample {
  double dt = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
  SampleForm form = SampleForm::kRate;
  std::optional<SubIncrements> sub;

  [[nodiscard]] static ImuSample from_rates(double dt, const Vec3& w, const Vec3& f) {
    return {dt, w, f, SampleForm::kRate, std::nullopt};
  }
  [[nodiscard]] static ImuSample from_increments(double dt, const Vec3& dtheta, const Vec3& dv,
                                                 std::optional<SubIncrements> sub = std::nullopt) {
    return {dt, dtheta, dv, SampleForm::kIncrement, sub};
  }

  [[nodiscard]] Vec3 angular_rate() const { return form == SampleForm::kRate ? gyro : Vec3(gyro / dt); }
  [[nodiscard]] Vec3 specific_force() const { return form == SampleForm::kRate ? accel : Vec3(accel / dt); }
  [[nodiscard]] Vec3 delta_theta() const { return form == SampleForm::kRate ? Vec3(gyro * dt) : gyro; }
  [[nodiscard]] Vec3 delta_v() const { return form == SampleForm::kRate ? Vec3(accel * dt) : accel; }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("IMU sample dt must be positive");
    if (!gyro.allFinite() || !accel.allFinite()) throw PreconditionError("IMU sample contains non-finite values");
    if (sub) {
      const auto close = [](const Vec3& a, const Vec3& b) {
        return (a - b).norm() <= 1e-12 * std::max(1.0, b.norm());
      };
      if (!close(sub->dtheta1 + sub->dtheta2, delta_theta()) || !close(sub->dv1 + sub->dv2, delta_v())) {
        throw PreconditionError("sub-increments do not sum to the full increments");
      }
    }
  }

  /// @brief Sample with the given bias removed, in the same form.
  [[nodiscard]] ImuSample corrected(const ImuBias& b) const {
    ImuSample out = *this;
    const double scale = form == SampleForm::kRate ? 1.0 : dt;
    out.gyro -= scale * b.gyro;
    out.accel -= scale * b.accel;
    if (out.sub) {
      const double half = 0.5 * dt;
      out.sub->dtheta1 -= half * b.gyro;
      out.sub->dtheta2 -= half * b.gyro;
      out.sub->dv1 -= half * b.accel;
      out.sub->dv2 -= half * b.accel;
    }
    return out;
  }
};

enum class BiasProcessKind { kConstant, kGaussMarkov, kRandomWalk };

/// Stochastic bias evolution used when simulating sensors.
struct BiasProcess {
  BiasProcessKind kind = BiasProcessKind::kConstant;
  double sigma = 0.0;  // steady-state std (Gauss-Markov) or driving std per sqrt(s)
  double tau = 0.0;    // correlation time, Gauss-Markov only
};

/// White-noise densities and bias processes of a sensor pair.
struct NoiseParams {
  double gyro_psd = 0.0;   // rad^2/s
  double accel_psd = 0.0;  // m^2/s^3
  BiasProcess gyro_bias;
  BiasProcess accel_bias;

  /// @brief Discrete covariance diag(gyro, accel)/dt of the rate noise held over dt.
  [[nodiscard]] Mat6 discrete_covariance(double dt) const {
    if (gyro_psd < 0.0 || accel_psd < 0.0) throw NonPsdError("noise densities must be non-negative");
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    Mat6 q = Mat6::Zero();
    q.diagonal() << Vec3::Constant(gyro_psd / dt), Vec3::Constant(accel_psd / dt);
    return q;
  }
};

}  // namespace se23nav
