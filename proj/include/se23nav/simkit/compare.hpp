// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <vector>

#include "se23nav/propagation.hpp"
#include "se23nav/serialization.hpp"
#include "se23nav/simkit/csv.hpp"
#include "se23nav/simkit/scenario.hpp"
#include "se23nav/uncertainty_metrics.hpp"

namespace se23nav::simkit {

/// Navigation errors of one propagated state against truth.
struct StateError {
  double attitude_rad = 0.0;
  double velocity = 0.0;
  double position = 0.0;
};

[[nodiscard]] inline StateError state_error(const NavState& est, const NavState& truth) {
  return {so3_log(truth.pose.rot.transpose() * est.pose.rot).norm(), (est.pose.vel - truth.pose.vel).norm(),
          (est.pose.pos - truth.pose.pos).norm()};
}

/// Result of propagating one scheme through a whole stream.
struct SchemeRun {
  SchemeKind scheme = SchemeKind::kZeroOrderHoldBody;
  StateError final_error;
  StateError max_error;
  Covariance9 covariance;
  MonotonicityReport monotonicity;
  std::vector<NavState> states;  // one per epoch
};

/// @brief Per-sample propagation of truth[0] through the stream. The bias
/// estimate is the sensor's initial bias; the covariance is right-sided.
[[nodiscard]] inline SchemeRun propagate_stream(const EarthModel& earth, const ImuStream& stream, FrameVariant variant,
                                                SchemeKind scheme, const NoiseParams& noise,
                                                const ImuBias& bias_estimate = {}) {
  SchemeRun run;
  run.scheme = scheme;
  NavState state = truth_state(earth, variant, stream.truth.front(), bias_estimate);
  run.states.reserve(stream.samples.size() + 1);
  run.states.push_back(state);
  std::vector<Mat9> chain{run.covariance.matrix};
  chain.reserve(stream.samples.size() + 1);
  for (std::size_t k = 0; k < stream.samples.size(); ++k) {
    const ImuSample& s = stream.samples[k];
    const LocalIncrement u = local_step(scheme, s, state.bias);
    state = propagate_step(earth, state, u).state;
    run.states.push_back(state);
    run.covariance = propagate_cov(run.covariance, transition_right(u), noise_jacobian(s, state.bias),
                                   noise.discrete_covariance(s.dt));
    chain.push_back(run.covariance.matrix);
    const StateError e = state_error(state, truth_state(earth, variant, stream.truth[k + 1]));
    run.max_error.attitude_rad = std::max(run.max_error.attitude_rad, e.attitude_rad);
    run.max_error.velocity = std::max(run.max_error.velocity, e.velocity);
    run.max_error.position = std::max(run.max_error.position, e.position);
    run.final_error = e;
  }
  run.monotonicity = verify_monotonicity(chain);
  return run;
}

/// Comparison of all configured schemes on one scenario.
struct RunReport {
  Scenario scenario;
  std::size_t samples = 0;
  std::vector<SchemeRun> runs;
};

[[nodiscard]] inline RunReport run_compare(const Scenario& sc, const EarthModel& earth = EarthModel{}) {
  const ImuStream stream = synthesize_imu(sc.trajectory, sc.sensor, sc.seed, earth);
  RunReport rep;
  rep.scenario = sc;
  rep.samples = stream.samples.size();
  for (SchemeKind k : sc.schemes) {
    SchemeRun r = propagate_stream(earth, stream, sc.variant, k, sc.sensor.noise, sc.sensor.initial_bias);
    r.states.clear();
    rep.runs.push_back(std::move(r));
  }
  return rep;
}

namespace detail {

inline nlohmann::json error_json(const StateError& e) {
  return {{"attitude_rad", e.attitude_rad}, {"velocity_mps", e.velocity}, {"position_m", e.position}};
}

}  // namespace detail

[[nodiscard]] inline nlohmann::json report_to_json(const RunReport& rep) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["trajectory"] = std::string(to_string(rep.scenario.trajectory.kind));
  j["variant"] = std::string(to_string(rep.scenario.variant));
  j["seed"] = rep.scenario.seed;
  j["samples"] = rep.samples;
  j["rate_hz"] = rep.scenario.trajectory.rate_hz;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : rep.runs) {
    nlohmann::json rj;
    rj["scheme"] = std::string(to_string(r.scheme));
    rj["final_error"] = detail::error_json(r.final_error);
    rj["max_error"] = detail::error_json(r.max_error);
    rj["covariance_sigma"] = se23nav::detail::to_json_array(Vec9(r.covariance.matrix.diagonal().cwiseSqrt()));
    rj["covariance_monotone"] = r.monotonicity.monotone();
    runs.push_back(rj);
  }
  j["schemes"] = runs;
  return j;
}

inline void write_report_csv(std::ostream& os, const RunReport& rep) {
  os << "scheme,attitude_rad,velocity_mps,position_m,max_attitude_rad,max_velocity_mps,max_position_m,"
        "covariance_monotone\n";
  for (const auto& r : rep.runs) {
    os << to_string(r.scheme) << ',' << format_double(r.final_error.attitude_rad) << ','
       << format_double(r.final_error.velocity) << ',' << format_double(r.final_error.position) << ','
       << format_double(r.max_error.attitude_rad) << ',' << format_double(r.max_error.velocity) << ','
       << format_double(r.max_error.position) << ',' << (r.monotonicity.monotone() ? "true" : "false") << '\n';
  }
}

}  // namespace se23nav::simkit
