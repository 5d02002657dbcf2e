// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

// Reference computations used by the test suite and `simkit verify`. They
// deliberately avoid the closed forms they are compared against: plain
// power series, dense 5x5 matrices, fixed-step RK4 and central differences.

#include <functional>

#include "se23nav/earth_models.hpp"
#include "se23nav/imu.hpp"

namespace se23nav::oracle {

/// @brief sum_{n<terms} K^n / (n+m)! with K = skew(phi).
[[nodiscard]] inline Mat3 gamma_series(int m, const Vec3& phi, int terms = 40) {
  Mat3 k = Mat3::Zero();
  k << 0, -phi.z(), phi.y(), phi.z(), 0, -phi.x(), -phi.y(), phi.x(), 0;
  Mat3 power = Mat3::Identity();
  Mat3 sum = Mat3::Zero();
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  for (int n = 0; n < terms; ++n) {
    sum += power / fact;
    power = power * k;
    fact *= (n + m + 1);
  }
  return sum;
}

/// @brief Power-series exponential of a 5x5 matrix.
[[nodiscard]] inline Mat5 matrix_exp_series(const Mat5& a, int terms = 30) {
  Mat5 term = Mat5::Identity();
  Mat5 sum = Mat5::Identity();
  for (int n = 1; n < terms; ++n) {
    term = term * a / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

/// @brief Fixed-step RK4 of a 5x5 matrix ODE X' = f(t, X).
[[nodiscard]] inline Mat5 rk4_matrix(const std::function<Mat5(double, const Mat5&)>& f, Mat5 x, double t0, double t1,
                                     int steps) {
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const Mat5 k1 = f(t, x);
    const Mat5 k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const Mat5 k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const Mat5 k4 = f(t + h, x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

inline Mat5 embed(const Mat3& c, const Vec3& v, const Vec3& r) {
  Mat5 m = Mat5::Identity();
  m.block<3, 3>(0, 0) = c;
  m.block<3, 1>(0, 3) = v;
  m.block<3, 1>(0, 4) = r;
  return m;
}

inline Mat3 cross_matrix(const Vec3& w) {
  Mat3 k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return k;
}

/// @brief Body-increment ODE: dC = C w^, dv = C f, dr = v, with constant
/// rates; returns the 5x5 increment after `duration`.
[[nodiscard]] inline Mat5 local_increment_rk4(const Vec3& w, const Vec3& f, double duration, int steps) {
  const Mat3 wx = cross_matrix(w);
  auto rhs = [&](double, const Mat5& x) {
    Mat5 d = Mat5::Zero();
    d.block<3, 3>(0, 0) = x.block<3, 3>(0, 0) * wx;
    d.block<3, 1>(0, 3) = x.block<3, 3>(0, 0) * f;
    d.block<3, 1>(0, 4) = x.block<3, 1>(0, 3);
    return d;
  };
  return rk4_matrix(rhs, Mat5::Identity(), 0.0, duration, steps);
}

/// @brief Frame-increment ODE: dC = -w^ C, dv = G - w x v, dr = v - w x r.
[[nodiscard]] inline Mat5 global_increment_rk4(const Vec3& w, const Vec3& big_g, double duration, int steps) {
  const Mat3 wx = cross_matrix(w);
  auto rhs = [&](double, const Mat5& x) {
    Mat5 d = Mat5::Zero();
    d.block<3, 3>(0, 0) = -wx * x.block<3, 3>(0, 0);
    d.block<3, 1>(0, 3) = big_g - wx * x.block<3, 1>(0, 3);
    d.block<3, 1>(0, 4) = x.block<3, 1>(0, 3) - wx * x.block<3, 1>(0, 4);
    return d;
  };
  return rk4_matrix(rhs, Mat5::Identity(), 0.0, duration, steps);
}

/// Full navigation state for direct integration of the strapdown equations.
struct StrapdownState {
  Mat3 rot = Mat3::Identity();
  Vec3 vel = Vec3::Zero();
  Vec3 pos = Vec3::Zero();
  Vec3 llh = Vec3::Zero();  // lat, lon, height; NED family only

  StrapdownState operator+(const StrapdownState& o) const {
    return {rot + o.rot, vel + o.vel, pos + o.pos, llh + o.llh};
  }
  StrapdownState operator*(double s) const { return {rot * s, vel * s, pos * s, llh * s}; }
};

/// @brief Right-hand side of the strapdown equations in the given variant
/// with rates and gravity evaluated at the current state.
[[nodiscard]] inline StrapdownState strapdown_rhs(const EarthModel& earth, FrameVariant variant, const Vec3& w_ib,
                                                  const Vec3& f_ib, const StrapdownState& x) {
  StrapdownState d;
  d.rot = x.rot * cross_matrix(w_ib);
  const Vec3 cf = x.rot * f_ib;
  if (is_ned_family(variant)) {
    const GeodeticPosition pos{x.llh.x(), x.llh.y(), x.llh.z()};
    const Vec3 w_ie = earth.earth_rate_n(pos);
    const Vec3 v_earth = is_transformed(variant) ? Vec3(x.vel - w_ie.cross(x.pos)) : x.vel;
    const Vec3 w_en = earth.transport_rate_n(pos, v_earth);
    const Vec3 w_in = w_ie + w_en;
    const Vec3 g = earth.gravity_n(pos);
    d.rot -= cross_matrix(w_in) * x.rot;
    if (is_transformed(variant)) {
      const Vec3 big_g = g + w_ie.cross(w_ie.cross(x.pos));
      d.vel = cf - w_in.cross(x.vel) + big_g;
      d.pos = -w_in.cross(x.pos) + x.vel;
    } else {
      d.vel = cf - (2.0 * w_ie + w_en).cross(x.vel) + g;
      d.pos = -w_en.cross(x.pos) + x.vel;
    }
    d.llh = earth.geodetic_rates(pos, v_earth);
  } else {
    const Vec3 w_ie = earth.earth_rate_e();
    const Vec3 g = earth.gravity_e(x.pos);
    d.rot -= cross_matrix(w_ie) * x.rot;
    if (is_transformed(variant)) {
      const Vec3 big_g = g + w_ie.cross(w_ie.cross(x.pos));
      d.vel = cf - w_ie.cross(x.vel) + big_g;
      d.pos = -w_ie.cross(x.pos) + x.vel;
    } else {
      d.vel = cf - 2.0 * w_ie.cross(x.vel) + g;
      d.pos = x.vel;
    }
    d.llh = Vec3::Zero();
  }
  return d;
}

/// @brief RK4 over one IMU interval with the sample's rates held constant.
[[nodiscard]] inline StrapdownState strapdown_rk4(const EarthModel& earth, FrameVariant variant,
                                                  const ImuSample& s, StrapdownState x, int substeps) {
  const Vec3 w = s.angular_rate();
  const Vec3 f = s.specific_force();
  const double h = s.dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    const StrapdownState k1 = strapdown_rhs(earth, variant, w, f, x);
    const StrapdownState k2 = strapdown_rhs(earth, variant, w, f, x + k1 * (0.5 * h));
    const StrapdownState k3 = strapdown_rhs(earth, variant, w, f, x + k2 * (0.5 * h));
    const StrapdownState k4 = strapdown_rhs(earth, variant, w, f, x + k3 * h);
    x = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
  }
  return x;
}

/// @brief Central-difference Jacobian of a vector function.
template <int Out, int In>
[[nodiscard]] Eigen::Matrix<double, Out, In> central_difference(
    const std::function<Eigen::Matrix<double, Out, 1>(const Eigen::Matrix<double, In, 1>&)>& fn, double step) {
  Eigen::Matrix<double, Out, In> j;
  for (int k = 0; k < In; ++k) {
    Eigen::Matrix<double, In, 1> e = Eigen::Matrix<double, In, 1>::Zero();
    e(k) = step;
    j.col(k) = (fn(e) - fn(-e)) / (2.0 * step);
  }
  return j;
}

}  // namespace se23nav::oracle
