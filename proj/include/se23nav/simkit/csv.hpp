// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "se23nav/simkit/trajectory.hpp"

namespace se23nav::simkit {

/// @brief Shortest decimal text that parses back to the same double.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void put_vec(std::ostream& os, const Vec3& v) {
  os << ',' << format_double(v.x()) << ',' << format_double(v.y()) << ',' << format_double(v.z());
}

inline double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw PreconditionError("CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline constexpr const char* kIncrementMarker = "# form=increment";
inline constexpr const char* kRateMarker = "# form=rate";

/// @brief IMU CSV: a form marker comment, a header row, then one row per
/// sample with its start time. Sub-increment columns follow when present.
inline void write_imu_csv(std::ostream& os, const std::vector<ImuSample>& samples, double t0 = 0.0) {
  const bool increments = !samples.empty() && samples.front().form == SampleForm::kIncrement;
  const bool with_sub = increments && samples.front().sub.has_value();
  os << (increments ? kIncrementMarker : kRateMarker) << '\n';
  const bool uniform = std::all_of(samples.begin(), samples.end(),
                                   [&](const ImuSample& s) { return s.dt == samples.front().dt; });
  if (!samples.empty() && uniform) os << "# dt=" << format_double(samples.front().dt) << '\n';
  os << "t,gx,gy,gz,ax,ay,az";
  if (with_sub) os << ",g1x,g1y,g1z,g2x,g2y,g2z,a1x,a1y,a1z,a2x,a2y,a2z";
  os << '\n';
  double elapsed = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const ImuSample& s = samples[k];
    os << format_double(uniform ? t0 + static_cast<double>(k) * s.dt : t0 + elapsed);
    detail::put_vec(os, s.gyro);
    detail::put_vec(os, s.accel);
    if (with_sub) {
      if (!s.sub) throw PreconditionError("sub-increments missing on some samples");
      detail::put_vec(os, s.sub->dtheta1);
      detail::put_vec(os, s.sub->dtheta2);
      detail::put_vec(os, s.sub->dv1);
      detail::put_vec(os, s.sub->dv2);
    }
    os << '\n';
    elapsed += s.dt;
  }
}

/// @brief Parses write_imu_csv output. A `# dt=` line fixes every interval;
/// otherwise each interval is the gap to the next row and the last row
/// reuses the previous one.
[[nodiscard]] inline std::vector<ImuSample> read_imu_csv(std::istream& is) {
  std::string line;
  SampleForm form = SampleForm::kRate;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::size_t columns = 0;
  std::optional<double> fixed_dt;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line == kIncrementMarker) form = SampleForm::kIncrement;
      if (line.rfind("# dt=", 0) == 0) fixed_dt = detail::parse_double(line.substr(5), lineno);
      continue;
    }
    if (!header_seen) {
      if (line.rfind("t,gx,gy,gz,ax,ay,az", 0) != 0) throw PreconditionError("IMU CSV header not recognised");
      columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      if (columns != 7 && columns != 19) throw PreconditionError("IMU CSV must have 7 or 19 columns");
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(detail::parse_double(cell, lineno));
    if (row.size() != columns) throw PreconditionError("CSV line " + std::to_string(lineno) + ": wrong column count");
    rows.push_back(std::move(row));
  }
  if (columns == 19 && form != SampleForm::kIncrement) {
    throw PreconditionError("sub-increment columns require increment form");
  }
  std::vector<ImuSample> out;
  out.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double dt = 0.0;
    if (fixed_dt) dt = *fixed_dt;
    else if (k + 1 < rows.size()) dt = rows[k + 1][0] - rows[k][0];
    else if (k > 0) dt = rows[k][0] - rows[k - 1][0];
    else throw PreconditionError("a single IMU row does not define an interval");
    const auto& r = rows[k];
    ImuSample s{dt, Vec3(r[1], r[2], r[3]), Vec3(r[4], r[5], r[6]), form, std::nullopt};
    if (columns == 19) {
      s.sub = SubIncrements{Vec3(r[7], r[8], r[9]), Vec3(r[10], r[11], r[12]), Vec3(r[13], r[14], r[15]),
                            Vec3(r[16], r[17], r[18])};
    }
    out.push_back(s);
  }
  return out;
}

/// @brief Truth CSV in ECEF: attitude as a unit quaternion with qw >= 0.
inline void write_truth_csv(std::ostream& os, const std::vector<TruthSample>& truth) {
  os << "t,qw,qx,qy,qz,vx,vy,vz,px,py,pz\n";
  for (const auto& s : truth) {
    Eigen::Quaterniond q(s.rot);
    if (q.w() < 0.0) q.coeffs() *= -1.0;
    os << format_double(s.t) << ',' << format_double(q.w());
    detail::put_vec(os, q.vec());
    detail::put_vec(os, s.vel);
    detail::put_vec(os, s.pos);
    os << '\n';
  }
}

}  // namespace se23nav::simkit
