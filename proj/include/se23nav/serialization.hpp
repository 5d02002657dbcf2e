// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <json.hpp>

#include <vector>

#include "se23nav/factors.hpp"
#include "se23nav/uncertainty_metrics.hpp"

namespace se23nav {

inline constexpr int kSchemaVersion = 1;

namespace detail {

template <typename Derived>
nlohmann::json to_json_array(const Eigen::MatrixBase<Derived>& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

template <typename M>
M from_json_array(const nlohmann::json& a) {
  M m;
  if (!a.is_array() || a.size() != static_cast<std::size_t>(m.rows() * m.cols())) {
    throw PreconditionError("JSON array has the wrong size");
  }
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = a.at(k++).get<double>();
  return m;
}

inline PerturbationSide parse_side(const std::string& s) {
  if (s == "right") return PerturbationSide::kRightLocal;
  if (s == "left") return PerturbationSide::kLeftCommonFrame;
  throw PreconditionError("unknown perturbation side '" + s + "'");
}

}  // namespace detail

/// @brief Factor record; doubles are written in shortest round-trip form.
[[nodiscard]] inline nlohmann::json factor_to_json(const PreintegrationFactor& f) {
  using detail::to_json_array;
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["t_i"] = f.t_i;
  j["t_j"] = f.t_j;
  j["variant"] = std::string(to_string(f.variant));
  j["increment"] = {{"rot", to_json_array(f.increment.rot)},
                    {"vel", to_json_array(f.increment.vel)},
                    {"pos", to_json_array(f.increment.pos)},
                    {"dt", f.increment.dt},
                    {"scheme", std::string(to_string(f.increment.scheme))}};
  j["covariance"] = {{"side", std::string(to_string(f.covariance.side))},
                     {"matrix", to_json_array(f.covariance.matrix)}};
  j["bias_jacobian"] = {{"matrix", to_json_array(f.bias_jacobian.matrix)},
                        {"gyro", to_json_array(f.bias_jacobian.linearization.gyro)},
                        {"accel", to_json_array(f.bias_jacobian.linearization.accel)}};
  j["global"] = {{"rot", to_json_array(f.global.rot)},
                 {"vel", to_json_array(f.global.vel)},
                 {"pos", to_json_array(f.global.pos)},
                 {"dt", f.global.dt}};
  return j;
}

[[nodiscard]] inline PreintegrationFactor factor_from_json(const nlohmann::json& j) {
  using detail::from_json_array;
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw PreconditionError("unsupported schema version");
  PreintegrationFactor f;
  f.t_i = j.at("t_i").get<double>();
  f.t_j = j.at("t_j").get<double>();
  f.variant = parse_frame_variant(j.at("variant").get<std::string>());
  const auto& inc = j.at("increment");
  f.increment = {from_json_array<Mat3>(inc.at("rot")), from_json_array<Vec3>(inc.at("vel")),
                 from_json_array<Vec3>(inc.at("pos")), inc.at("dt").get<double>(),
                 parse_scheme(inc.at("scheme").get<std::string>())};
  const auto& cov = j.at("covariance");
  f.covariance = {from_json_array<Mat9>(cov.at("matrix")), detail::parse_side(cov.at("side").get<std::string>())};
  const auto& bj = j.at("bias_jacobian");
  f.bias_jacobian = {from_json_array<Mat96>(bj.at("matrix")),
                     ImuBias{from_json_array<Vec3>(bj.at("gyro")), from_json_array<Vec3>(bj.at("accel"))}};
  const auto& g = j.at("global");
  f.global = {from_json_array<Mat3>(g.at("rot")), from_json_array<Vec3>(g.at("vel")),
              from_json_array<Vec3>(g.at("pos")), g.at("dt").get<double>(), f.variant};
  return f;
}

[[nodiscard]] inline nlohmann::json monotonicity_to_json(const MonotonicityReport& rep) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["monotone"] = rep.monotone();
  j["slack"] = rep.slack;
  j["steps"] = rep.log_dets.size();
  nlohmann::json lds = nlohmann::json::array();
  for (double v : rep.log_dets) lds.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
  j["log_det"] = lds;
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : rep.violations) {
    vs.push_back({{"index", v.index}, {"log_det_before", v.log_det_before}, {"log_det_after", v.log_det_after}});
  }
  j["violations"] = vs;
  if (auto first = rep.first_violation()) j["first_violation"] = *first;
  else j["first_violation"] = nullptr;
  return j;
}

}  // namespace se23nav
