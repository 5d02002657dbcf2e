// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "se23nav/increments.hpp"
#include "se23nav/simkit/config.hpp"
#include "se23nav/simkit/trajectory.hpp"

namespace se23nav::simkit {

/// Everything a simkit run needs, read from a config file.
struct Scenario {
  TrajectorySpec trajectory;
  SensorErrorSpec sensor;
  std::uint64_t seed = 1;
  FrameVariant variant = FrameVariant::kTransformedEcef;
  std::vector<SchemeKind> schemes{SchemeKind::kConstantGlobalAccel, SchemeKind::kZeroOrderHoldBody,
                                  SchemeKind::kTwoSampleCompensated};
  std::size_t window = 100;  // samples per preintegration factor
};

namespace detail {

inline constexpr double kDeg = std::numbers::pi / 180.0;

inline BiasProcess read_bias_process(const Config& c, const std::string& prefix) {
  BiasProcess p;
  const std::string model = c.get_string(prefix + "_model", "constant");
  if (model == "constant") p.kind = BiasProcessKind::kConstant;
  else if (model == "gauss-markov") p.kind = BiasProcessKind::kGaussMarkov;
  else if (model == "random-walk") p.kind = BiasProcessKind::kRandomWalk;
  else throw PreconditionError("unknown bias model '" + model + "'");
  p.sigma = c.get_double(prefix + "_sigma", 0.0);
  p.tau = c.get_double(prefix + "_tau", 0.0);
  return p;
}

}  // namespace detail

/// @brief Scenario from config keys; angles in the file are in degrees.
[[nodiscard]] inline Scenario scenario_from_config(const Config& c) {
  using detail::kDeg;
  Scenario s;
  TrajectorySpec& t = s.trajectory;
  t.kind = parse_motion(c.get_string("trajectory.kind", "static"));
  t.duration = c.get_double("trajectory.duration", t.duration);
  t.rate_hz = c.get_double("trajectory.rate_hz", t.rate_hz);
  t.origin = {c.get_double("trajectory.lat_deg", 40.0) * kDeg, c.get_double("trajectory.lon_deg", 10.0) * kDeg,
              c.get_double("trajectory.height", 100.0)};
  t.initial_rpy = c.get_vec3("trajectory.rpy_deg", Vec3::Zero()) * kDeg;
  t.body_rate = c.get_vec3("trajectory.body_rate", Vec3::Zero());
  t.body_velocity = c.get_vec3("trajectory.body_velocity", Vec3::Zero());
  t.coning_amplitude = c.get_double("trajectory.coning_amplitude_deg", 0.0) * kDeg;
  t.coning_frequency = c.get_double("trajectory.coning_frequency", 0.0);
  t.coning_phase = c.get_double("trajectory.coning_phase_deg", 0.0) * kDeg;
  t.speed = c.get_double("trajectory.speed", 0.0);
  t.radius = c.get_double("trajectory.radius", 0.0);
  t.validate();

  NoiseParams& n = s.sensor.noise;
  n.gyro_psd = c.get_double("sensor.gyro_psd", 0.0);
  n.accel_psd = c.get_double("sensor.accel_psd", 0.0);
  n.gyro_bias = detail::read_bias_process(c, "sensor.gyro_bias");
  n.accel_bias = detail::read_bias_process(c, "sensor.accel_bias");
  s.sensor.initial_bias = {c.get_vec3("sensor.gyro_bias", Vec3::Zero()), c.get_vec3("sensor.accel_bias", Vec3::Zero())};
  if (n.gyro_psd < 0.0 || n.accel_psd < 0.0) throw NonPsdError("noise densities must be non-negative");

  const long long seed = c.get_int("run.seed", 1);
  if (seed < 0) throw PreconditionError("seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.variant = parse_frame_variant(c.get_string("run.variant", "transformed-ecef"));
  if (c.has("run.schemes")) {
    s.schemes.clear();
    std::stringstream ss(c.get_string("run.schemes", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(' ');
      const auto e = item.find_last_not_of(' ');
      if (b == std::string::npos) continue;
      s.schemes.push_back(parse_scheme(item.substr(b, e - b + 1)));
    }
    if (s.schemes.empty()) throw PreconditionError("run.schemes lists no scheme");
  }
  const long long window = c.get_int("run.window", 100);
  if (window <= 0) throw PreconditionError("run.window must be positive");
  s.window = static_cast<std::size_t>(window);
  return s;
}

}  // namespace se23nav::simkit
