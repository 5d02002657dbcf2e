// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

#include "se23nav/factors.hpp"
#include "se23nav/oracles.hpp"
#include "se23nav/serialization.hpp"
#include "se23nav/simkit/random.hpp"
#include "se23nav/uncertainty_metrics.hpp"

namespace se23nav::simkit {

/// One measured quantity against its bound.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;

  [[nodiscard]] bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  void add(std::string name, double value, double tolerance) {
    checks.push_back({std::move(name), value, tolerance, value <= tolerance});
  }
};

/// Test hook: negates one named Jacobian block before comparison.
struct FaultInjection {
  std::string flip_block;  // "", "noise.rot_gyro", "noise.vel_gyro", "noise.pos_accel", "factor.ti", "factor.bias"
};

namespace detail {

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return (a - ref).norm() / std::max(1e-12, ref.norm());
}

inline ImuSample random_sample(CounterRng& rng, double dt) {
  const Vec3 w = random_gaussian3(rng, 0.5);
  const Vec3 f = random_gaussian3(rng, 5.0);
  const Vec3 w1 = w + random_gaussian3(rng, 0.05);
  const Vec3 f1 = f + random_gaussian3(rng, 0.2);
  const SubIncrements sub{w1 * 0.5 * dt, (2.0 * w - w1) * 0.5 * dt, f1 * 0.5 * dt, (2.0 * f - f1) * 0.5 * dt};
  return ImuSample::from_increments(dt, sub.dtheta1 + sub.dtheta2, sub.dv1 + sub.dv2, sub);
}

inline void flip(Mat96& g, const std::string& block) {
  if (block == "noise.rot_gyro") g.block<3, 3>(0, 0) *= -1.0;
  if (block == "noise.vel_gyro") g.block<3, 3>(3, 0) *= -1.0;
  if (block == "noise.pos_accel") g.block<3, 3>(6, 3) *= -1.0;
}

}  // namespace detail

/// @brief Group axioms, exp/log round trips and Gamma identities.
[[nodiscard]] inline VerifyReport verify_group_axioms(std::uint64_t seed, int samples = 10000) {
  CounterRng rng(seed, 101);
  double roundtrip = 0.0, assoc = 0.0, inverse = 0.0, adj = 0.0, series = 0.0, ident = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Tangent9 xi = random_tangent(rng, std::numbers::pi - 0.01, 3.0);
    roundtrip = std::max(roundtrip, (log_se23(exp_se23(xi)).vector() - xi.vector()).norm());
    const ExtendedPose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    assoc = std::max(assoc, (((a * b) * c).matrix() - (a * (b * c)).matrix()).norm());
    inverse = std::max(inverse, ((a * a.inverse()).matrix() - Mat5::Identity()).norm());
    const Tangent9 small = random_tangent(rng, 0.5, 0.5);
    const Mat5 lhs = (a * exp_se23(small) * a.inverse()).matrix();
    const Mat5 rhs = exp_se23(Vec9(adjoint(a) * small.vector())).matrix();
    adj = std::max(adj, (lhs - rhs).norm());
    if (i < 1000) {
      series = std::max(series, (exp_se23(small).matrix() - oracle::matrix_exp_series(hat(small))).norm());
      const Vec3 phi = random_ball3(rng, 3.0);
      const Mat3 c0 = gamma<0>(phi);
      for (int m = 0; m <= 3; ++m) {
        ident = std::max(ident, (gamma(m, Vec3(-phi)) - gamma(m, phi).transpose()).norm());
        ident = std::max(ident, (c0 * gamma(m, phi) - gamma(m, Vec3(c0 * phi)) * c0).norm());
      }
      ident = std::max(ident, (gamma<2>(phi) * skew(phi) + Mat3::Identity() - gamma<1>(phi)).norm());
      ident = std::max(ident, (gamma<3>(phi) * skew(phi) + 0.5 * Mat3::Identity() - gamma<2>(phi)).norm());
    }
  }
  VerifyReport rep{"group-axioms", {}};
  rep.add("exp_log_roundtrip", roundtrip, 1e-10);
  rep.add("associativity", assoc, 1e-9);
  rep.add("inverse", inverse, 1e-12);
  rep.add("adjoint_conjugation", adj, 1e-9);
  rep.add("exp_vs_matrix_series", series, 1e-12);
  rep.add("gamma_identities", ident, 1e-12);
  return rep;
}

/// @brief Noise and factor Jacobians against central differences.
[[nodiscard]] inline VerifyReport verify_jacobians(std::uint64_t seed, const FaultInjection& fault = {}) {
  CounterRng rng(seed, 102);
  VerifyReport rep{"jacobians", {}};
  const double dt = 0.01;
  double noise_worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const ImuSample s = detail::random_sample(rng, dt);
    const LocalIncrement nominal = local_step(SchemeKind::kZeroOrderHoldBody, s);
    const ExtendedPose inv = nominal.pose().inverse();
    const std::function<Vec9(const Vec6&)> fn = [&](const Vec6& eta) {
      const ImuSample p = ImuSample::from_rates(dt, s.angular_rate() - eta.head<3>(), s.specific_force() - eta.tail<3>());
      return log_se23_vector(inv * local_step(SchemeKind::kZeroOrderHoldBody, p).pose());
    };
    Mat96 g = noise_jacobian(s);
    detail::flip(g, fault.flip_block);
    const Mat96 fd = oracle::central_difference<9, 6>(fn, 1e-6);
    noise_worst = std::max(noise_worst, detail::rel_diff(g, fd));
  }
  rep.add("noise_jacobian" + (fault.flip_block.rfind("noise.", 0) == 0 ? "[" + fault.flip_block + "]" : std::string()),
          noise_worst, 1e-4);

  // Factor Jacobians on a 20-sample window with a residual of norm 1e-2.
  const EarthModel earth;
  double ti_worst = 0.0, tj_worst = 0.0, b_worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::vector<ImuSample> window;
    for (int k = 0; k < 20; ++k) window.push_back(detail::random_sample(rng, dt));
    Preintegrator pre(SchemeKind::kZeroOrderHoldBody, ImuBias{}, NoiseParams{1e-6, 1e-4, {}, {}});
    for (const auto& s : window) pre.integrate(s);
    NavState ti;
    ti.variant = FrameVariant::kTransformedEcef;
    ti.pose = {so3_exp(random_ball3(rng, 2.0)), random_gaussian3(rng, 100.0), earth.to_ecef({0.6, 0.3, 50.0})};
    const GlobalIncrement g = global_step(kinematic_context(earth, ti), pre.increment().dt);
    const PreintegrationFactor f = pre.factor(0.0, g);
    NavState tj = propagate_state(earth, ti, g, f.increment);
    Vec9 offset;
    offset << random_gaussian3(rng), random_gaussian3(rng), random_gaussian3(rng);
    offset = offset.normalized() * 1e-2;
    tj.pose = tj.pose * exp_se23(offset);
    const Vec6 db = Vec6::Zero();
    const auto res_ti = [&](const Vec9& xi) {
      NavState p = ti;
      p.pose = ti.pose * exp_se23(xi);
      return residual(f, p, tj, db, earth);
    };
    const auto res_tj = [&](const Vec9& xi) {
      NavState p = tj;
      p.pose = tj.pose * exp_se23(xi);
      return residual(f, ti, p, db, earth);
    };
    const std::function<Vec9(const Vec6&)> res_b = [&](const Vec6& d) { return residual(f, ti, tj, d, earth); };
    Mat9 j_ti = jacobian_wrt_ti(f, ti, tj, db, JacobianMode::kExact, earth);
    Mat96 j_b = jacobian_wrt_bias(f, ti, tj, db, JacobianMode::kExact, earth);
    if (fault.flip_block == "factor.ti") j_ti *= -1.0;
    if (fault.flip_block == "factor.bias") j_b *= -1.0;
    ti_worst = std::max(ti_worst, detail::rel_diff(j_ti, oracle::central_difference<9, 9>(res_ti, 1e-6)));
    tj_worst = std::max(tj_worst, detail::rel_diff(jacobian_wrt_tj(f, ti, tj, db, JacobianMode::kExact, earth),
                                                   oracle::central_difference<9, 9>(res_tj, 1e-6)));
    b_worst = std::max(b_worst, detail::rel_diff(j_b, oracle::central_difference<9, 6>(res_b, 1e-6)));
  }
  rep.add(fault.flip_block == "factor.ti" ? "factor_jacobian_ti[factor.ti]" : "factor_jacobian_ti", ti_worst, 1e-3);
  rep.add("factor_jacobian_tj", tj_worst, 1e-3);
  rep.add(fault.flip_block == "factor.bias" ? "factor_jacobian_bias[factor.bias]" : "factor_jacobian_bias", b_worst,
          1e-3);
  return rep;
}

/// @brief Closed-form increments against RK4 and series oracles.
[[nodiscard]] inline VerifyReport verify_oracles(std::uint64_t seed) {
  CounterRng rng(seed, 103);
  VerifyReport rep{"oracles", {}};
  const EarthModel earth;
  KinematicContext ctx = kinematic_context(earth, FrameVariant::kTransformedEcef,
                                           ExtendedPose{Mat3::Identity(), Vec3::Zero(), earth.to_ecef({0.7, 0.1, 0.0})});
  const double horizon = 1.0;
  const Mat5 ref = oracle::global_increment_rk4(ctx.frame_rate, ctx.gravitation, horizon, 10000);
  const GlobalIncrement g = global_step(ctx, horizon);
  rep.add("global_ecef_position", (g.pos - ref.block<3, 1>(0, 4)).norm(), 1e-9);
  rep.add("global_ecef_velocity", (g.vel - ref.block<3, 1>(0, 3)).norm(), 1e-10);
  rep.add("global_ecef_attitude", so3_log(g.rot.transpose() * ref.block<3, 3>(0, 0)).norm(), 1e-12);

  double zoh = 0.0, gam = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Vec3 w = random_gaussian3(rng, 0.3);
    const Vec3 f = random_gaussian3(rng, 3.0);
    LocalIncrement u = LocalIncrement::identity();
    const ImuSample s = ImuSample::from_rates(0.01, w, f);
    for (int k = 0; k < 100; ++k) u = compose_local(u, local_step(SchemeKind::kZeroOrderHoldBody, s));
    const Mat5 r = oracle::local_increment_rk4(w, f, 1.0, 10000);
    zoh = std::max(zoh, (u.pose().matrix() - r).cwiseAbs().maxCoeff());
    const Vec3 phi = random_ball3(rng, 3.0);
    for (int m = 0; m <= 3; ++m) gam = std::max(gam, (gamma(m, phi) - oracle::gamma_series(m, phi)).norm());
  }
  rep.add("zero_order_hold_vs_rk4", zoh, 1e-11);
  rep.add("gamma_vs_series", gam, 1e-13);
  return rep;
}

/// @brief Recursive against closed-form bias Jacobians and the first-order
/// correction against re-preintegration.
[[nodiscard]] inline VerifyReport verify_bias(std::uint64_t seed) {
  CounterRng rng(seed, 104);
  VerifyReport rep{"bias", {}};
  std::vector<ImuSample> window;
  for (int k = 0; k < 1000; ++k) window.push_back(detail::random_sample(rng, 0.005));
  const ImuBias b_bar{random_gaussian3(rng, 0.01), random_gaussian3(rng, 0.1)};
  const BiasJacobian rec = bias_jacobian_recursive(window, b_bar);
  const BiasJacobian closed = bias_jacobian_closed_form(window, b_bar);
  rep.add("recursive_vs_closed_form", (rec.matrix - closed.matrix).cwiseAbs().maxCoeff(), 1e-10);

  const LocalIncrement base = preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, b_bar);
  const Vec6 dir = (Vec6() << random_gaussian3(rng), random_gaussian3(rng)).finished().normalized();
  auto err = [&](double h) {
    const Vec6 db = h * dir;
    const LocalIncrement exact = preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, b_bar + db);
    const LocalIncrement approx = apply_bias_correction(base, rec, db);
    return log_se23_vector(approx.pose().inverse() * exact.pose()).norm();
  };
  const double e1 = err(1e-3);
  const double e2 = err(5e-4);
  rep.add("richardson_ratio_deviation", std::abs(e1 / e2 - 4.0), 0.3);
  return rep;
}

/// @brief det A = 1 and non-decreasing log det along random noisy chains.
[[nodiscard]] inline VerifyReport verify_monotonicity_suite(std::uint64_t seed, int steps = 1000) {
  CounterRng rng(seed, 105);
  VerifyReport rep{"monotonicity", {}};
  const EarthModel earth;
  const NoiseParams noise{1e-6, 1e-4, {}, {}};
  double det_dev = 0.0;
  double worst_step = 0.0;
  for (PerturbationSide side : {PerturbationSide::kRightLocal, PerturbationSide::kLeftCommonFrame}) {
    NavState st;
    st.pose.pos = earth.to_ecef({0.5, 0.5, 0.0});
    Covariance9 sigma{Mat9::Identity() * 1e-6, side};
    std::vector<Mat9> chain{sigma.matrix};
    for (int k = 0; k < steps; ++k) {
      const ImuSample s = detail::random_sample(rng, 0.01);
      const GlobalIncrement g = global_step(kinematic_context(earth, st), s.dt);
      const LocalIncrement u = local_step(SchemeKind::kZeroOrderHoldBody, s);
      st = propagate_state(earth, st, g, u);
      const TransitionMatrix a = side == PerturbationSide::kRightLocal ? transition_right(u) : transition_left(g);
      det_dev = std::max(det_dev, std::abs(a.matrix.determinant() - 1.0));
      sigma = propagate_cov(sigma, a, noise_jacobian(s), noise.discrete_covariance(s.dt), st.pose);
      chain.push_back(sigma.matrix);
    }
    const MonotonicityReport m = verify_monotonicity(chain);
    for (std::size_t k = 1; k < m.log_dets.size(); ++k) {
      worst_step = std::max(worst_step, m.log_dets[k - 1] - m.log_dets[k]);
    }
  }
  rep.add("transition_det_deviation", det_dev, 1e-10);
  rep.add("log_det_max_decrease", worst_step, 1e-12);
  return rep;
}

[[nodiscard]] inline VerifyReport run_verify(const std::string& what, std::uint64_t seed,
                                             const FaultInjection& fault = {}) {
  if (what == "group-axioms") return verify_group_axioms(seed);
  if (what == "jacobians") return verify_jacobians(seed, fault);
  if (what == "oracles") return verify_oracles(seed);
  if (what == "bias") return verify_bias(seed);
  if (what == "monotonicity") return verify_monotonicity_suite(seed);
  throw PreconditionError("unknown verify target '" + what + "'");
}

[[nodiscard]] inline nlohmann::json verify_to_json(const VerifyReport& rep) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["suite"] = rep.suite;
  j["pass"] = rep.pass();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  j["checks"] = checks;
  return j;
}

}  // namespace se23nav::simkit
