// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "se23nav/earth_models.hpp"
#include "se23nav/imu.hpp"
#include "se23nav/propagation.hpp"
#include "se23nav/simkit/rng.hpp"

namespace se23nav::simkit {

enum class MotionKind { kStatic, kConstantTwist, kConing, kGreatCircle };

[[nodiscard]] inline std::string_view to_string(MotionKind k) {
  switch (k) {
    case MotionKind::kStatic: return "static";
    case MotionKind::kConstantTwist: return "constant-twist";
    case MotionKind::kConing: return "coning";
    case MotionKind::kGreatCircle: return "great-circle";
  }
  return "unknown";
}

[[nodiscard]] inline MotionKind parse_motion(std::string_view s) {
  for (auto k : {MotionKind::kStatic, MotionKind::kConstantTwist, MotionKind::kConing, MotionKind::kGreatCircle}) {
    if (s == to_string(k)) return k;
  }
  throw PreconditionError("unknown trajectory kind '" + std::string(s) + "'");
}

/// Analytic motion relative to the earth-fixed frame.
struct TrajectorySpec {
  MotionKind kind = MotionKind::kStatic;
  double duration = 10.0;   // s
  double rate_hz = 100.0;   // IMU sample rate
  GeodeticPosition origin{0.7, 0.2, 100.0};
  Vec3 initial_rpy = Vec3::Zero();      // body attitude w.r.t. NED at t = 0
  Vec3 body_rate = Vec3::Zero();        // constant twist, rad/s
  Vec3 body_velocity = Vec3::Zero();    // constant twist, m/s
  double coning_amplitude = 0.0;        // half-angle, rad
  double coning_frequency = 0.0;        // Hz
  double coning_phase = 0.0;            // rad
  double speed = 0.0;                   // great circle, m/s
  double radius = 0.0;                  // great circle; 0 selects |r(origin)|

  [[nodiscard]] std::size_t sample_count() const {
    return static_cast<std::size_t>(std::llround(duration * rate_hz));
  }

  void validate() const {
    origin.validate();
    if (!(duration > 0.0) || !(rate_hz > 0.0)) throw PreconditionError("duration and rate must be positive");
    if (kind == MotionKind::kConing) {
      if (!(coning_frequency > 0.0)) throw PreconditionError("coning frequency must be positive");
      if (rate_hz < 2.0 * coning_frequency) {
        throw PreconditionError("sample rate below twice the coning frequency");
      }
    }
    if (kind == MotionKind::kConstantTwist && rate_hz < 2.0 * body_rate.norm() / (2.0 * std::numbers::pi)) {
      throw PreconditionError("sample rate below twice the rotation frequency");
    }
    if (kind == MotionKind::kGreatCircle && radius < 0.0) throw PreconditionError("radius must be non-negative");
  }
};

/// Truth at one epoch, all in ECEF: body attitude, earth-relative
/// velocity, position, acceleration, and body rate relative to the earth.
struct TruthSample {
  double t = 0.0;
  Mat3 rot = Mat3::Identity();
  Vec3 vel = Vec3::Zero();
  Vec3 pos = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
  Vec3 body_rate = Vec3::Zero();
};

/// @brief Body-to-NED rotation from roll, pitch, yaw.
[[nodiscard]] inline Mat3 rotation_from_rpy(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

/// Closed-form trajectory evaluator.
class Trajectory {
 public:
  Trajectory(const TrajectorySpec& spec, const EarthModel& earth) : spec_(spec), earth_(earth) {
    spec.validate();
    r0_ = earth.to_ecef(spec.origin);
    c0_ = earth.ned_to_ecef(spec.origin) * rotation_from_rpy(spec.initial_rpy);
    twist_rate_ = spec.body_rate;
    twist_vel_ = spec.body_velocity;
    if (spec.kind == MotionKind::kGreatCircle) {
      const double radius = spec.radius > 0.0 ? spec.radius : r0_.norm();
      const Vec3 up = r0_.normalized();
      const Vec3 north_ned = earth.ned_to_ecef(spec.origin).col(0);
      const Vec3 x = (north_ned - north_ned.dot(up) * up).normalized();
      const Vec3 z = -up;
      c0_.col(0) = x;
      c0_.col(2) = z;
      c0_.col(1) = z.cross(x);
      r0_ = radius * up;
      twist_rate_ = Vec3(0.0, -spec.speed / radius, 0.0);
      twist_vel_ = Vec3(spec.speed, 0.0, 0.0);
    }
    if (spec.kind == MotionKind::kConing) c_ref_ = c0_ * so3_exp(cone_vector(0.0)).transpose();
  }

  [[nodiscard]] const TrajectorySpec& spec() const { return spec_; }

  [[nodiscard]] TruthSample at(double t) const {
    TruthSample s;
    s.t = t;
    switch (spec_.kind) {
      case MotionKind::kStatic:
        s.rot = c0_;
        s.pos = r0_;
        break;
      case MotionKind::kConstantTwist:
      case MotionKind::kGreatCircle: {
        const Vec3 phi = twist_rate_ * t;
        s.rot = c0_ * gamma<0>(phi);
        s.pos = r0_ + c0_ * gamma<1>(phi) * twist_vel_ * t;
        s.vel = s.rot * twist_vel_;
        s.accel = s.rot * twist_rate_.cross(twist_vel_);
        s.body_rate = twist_rate_;
        break;
      }
      case MotionKind::kConing: {
        const Vec3 phi = cone_vector(t);
        s.rot = c_ref_ * so3_exp(phi);
        s.pos = r0_;
        s.body_rate = gamma<1>(Vec3(-phi)) * cone_rate(t);
        break;
      }
    }
    return s;
  }

  /// @brief Ideal gyro output omega_ib^b.
  [[nodiscard]] Vec3 gyro(const TruthSample& s) const {
    return s.body_rate + s.rot.transpose() * earth_.earth_rate_e();
  }

  /// @brief Ideal accelerometer output f_ib^b.
  [[nodiscard]] Vec3 accel(const TruthSample& s) const {
    const Vec3 w = earth_.earth_rate_e();
    return s.rot.transpose() * (s.accel + 2.0 * w.cross(s.vel) - earth_.gravity_e(s.pos));
  }

 private:
  [[nodiscard]] Vec3 cone_vector(double t) const {
    const double a = 2.0 * std::numbers::pi * spec_.coning_frequency * t + spec_.coning_phase;
    return spec_.coning_amplitude * Vec3(0.0, std::cos(a), std::sin(a));
  }
  [[nodiscard]] Vec3 cone_rate(double t) const {
    const double w = 2.0 * std::numbers::pi * spec_.coning_frequency;
    const double a = w * t + spec_.coning_phase;
    return spec_.coning_amplitude * w * Vec3(0.0, -std::sin(a), std::cos(a));
  }

  TrajectorySpec spec_;
  EarthModel earth_;
  Vec3 r0_ = Vec3::Zero();
  Mat3 c0_ = Mat3::Identity();
  Mat3 c_ref_ = Mat3::Identity();
  Vec3 twist_rate_ = Vec3::Zero();
  Vec3 twist_vel_ = Vec3::Zero();
};

/// Sensor errors applied during synthesis.
struct SensorErrorSpec {
  NoiseParams noise;
  ImuBias initial_bias;
};

/// Synthesised samples with the truth at every sample boundary.
struct ImuStream {
  double rate_hz = 0.0;
  std::vector<ImuSample> samples;
  std::vector<TruthSample> truth;  // samples.size() + 1 epochs
  std::vector<ImuBias> bias;       // true bias during each sample
};

namespace detail {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                    0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                      0.2223810344533745, 0.1012285362903763};

inline void integrate_interval(const Trajectory& traj, double a, double b, Vec3& dtheta, Vec3& dv) {
  dtheta.setZero();
  dv.setZero();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
    const TruthSample s = traj.at(mid + half * kGlNodes[k]);
    dtheta += kGlWeights[k] * half * traj.gyro(s);
    dv += kGlWeights[k] * half * traj.accel(s);
  }
}

inline Vec3 gaussian3(CounterRng& rng) {
  const double x = rng.gaussian();
  const double y = rng.gaussian();
  const double z = rng.gaussian();
  return {x, y, z};
}

inline Vec3 step_bias(const BiasProcess& p, const Vec3& b, double dt, CounterRng& rng) {
  switch (p.kind) {
    case BiasProcessKind::kConstant:
      return b;
    case BiasProcessKind::kGaussMarkov: {
      if (!(p.tau > 0.0)) throw PreconditionError("Gauss-Markov bias needs tau > 0");
      const double phi = std::exp(-dt / p.tau);
      return phi * b + p.sigma * std::sqrt(1.0 - phi * phi) * gaussian3(rng);
    }
    case BiasProcessKind::kRandomWalk:
      return b + p.sigma * std::sqrt(dt) * gaussian3(rng);
  }
  return b;
}

}  // namespace detail

/// @brief Samples in increment form with half-interval sub-increments. Ideal
/// increments come from 8-point Gauss-Legendre quadrature of the analytic
/// rates on each half interval; white noise is added per half interval.
[[nodiscard]] inline ImuStream synthesize_imu(const TrajectorySpec& spec, const SensorErrorSpec& err,
                                              std::uint64_t seed, const EarthModel& earth = EarthModel{}) {
  const Trajectory traj(spec, earth);
  const std::size_t n = spec.sample_count();
  const double dt = 1.0 / spec.rate_hz;
  const double half = 0.5 * dt;
  CounterRng gyro_rng(seed, 1), accel_rng(seed, 2), gyro_bias_rng(seed, 3), accel_bias_rng(seed, 4);
  const double gyro_std = std::sqrt(err.noise.gyro_psd * half);
  const double accel_std = std::sqrt(err.noise.accel_psd * half);

  ImuStream out;
  out.rate_hz = spec.rate_hz;
  out.samples.reserve(n);
  out.truth.reserve(n + 1);
  out.bias.reserve(n);
  ImuBias bias = err.initial_bias;
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    out.truth.push_back(traj.at(t0));
    SubIncrements sub;
    detail::integrate_interval(traj, t0, t0 + half, sub.dtheta1, sub.dv1);
    detail::integrate_interval(traj, t0 + half, t0 + dt, sub.dtheta2, sub.dv2);
    sub.dtheta1 += bias.gyro * half + gyro_std * detail::gaussian3(gyro_rng);
    sub.dtheta2 += bias.gyro * half + gyro_std * detail::gaussian3(gyro_rng);
    sub.dv1 += bias.accel * half + accel_std * detail::gaussian3(accel_rng);
    sub.dv2 += bias.accel * half + accel_std * detail::gaussian3(accel_rng);
    out.samples.push_back(ImuSample::from_increments(dt, sub.dtheta1 + sub.dtheta2, sub.dv1 + sub.dv2, sub));
    out.bias.push_back(bias);
    bias.gyro = detail::step_bias(err.noise.gyro_bias, bias.gyro, dt, gyro_bias_rng);
    bias.accel = detail::step_bias(err.noise.accel_bias, bias.accel, dt, accel_bias_rng);
  }
  out.truth.push_back(traj.at(static_cast<double>(n) * dt));
  return out;
}

/// @brief Truth expressed as a navigation state of the requested variant.
[[nodiscard]] inline NavState truth_state(const EarthModel& earth, FrameVariant variant, const TruthSample& s,
                                          const ImuBias& bias = {}) {
  NavState st;
  st.variant = variant;
  st.epoch = s.t;
  st.bias = bias;
  if (is_ned_family(variant)) {
    st.anchor = earth.to_geodetic(s.pos);
    const Mat3 c_en = earth.ned_to_ecef(st.anchor).transpose();
    st.pose = {c_en * s.rot, c_en * s.vel, c_en * s.pos};
  } else {
    st.pose = {s.rot, s.vel, s.pos};
  }
  if (is_transformed(variant)) st.pose.vel += frame_earth_rate(earth, st).cross(st.pose.pos);
  return st;
}

}  // namespace se23nav::simkit
