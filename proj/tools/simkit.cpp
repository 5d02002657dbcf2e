// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
//
// simkit: trajectory simulation, preintegration and verification front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "se23nav/se23nav.hpp"
#include "se23nav/simkit/compare.hpp"
#include "se23nav/simkit/csv.hpp"
#include "se23nav/simkit/scenario.hpp"
#include "se23nav/simkit/verify.hpp"

namespace fs = std::filesystem;
using namespace se23nav;
using namespace se23nav::simkit;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::string format = "json";
};

Scenario load_scenario(const CommonArgs& args) {
  return scenario_from_config(args.config.empty() ? Config{} : Config::load(args.config));
}

std::ofstream open_output(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out);
  const fs::path path = fs::path(args.out) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PreconditionError("cannot write '" + path.string() + "'");
  return os;
}

void write_json(const CommonArgs& args, const std::string& stem, const nlohmann::json& j) {
  auto os = open_output(args, stem + ".json");
  os << j.dump(2) << '\n';
}

int cmd_simulate(const CommonArgs& args) {
  const Scenario sc = load_scenario(args);
  const ImuStream stream = synthesize_imu(sc.trajectory, sc.sensor, sc.seed);
  auto imu = open_output(args, "imu.csv");
  write_imu_csv(imu, stream.samples);
  auto truth = open_output(args, "truth.csv");
  write_truth_csv(truth, stream.truth);
  std::cerr << "simulate: wrote " << stream.samples.size() << " samples to " << args.out << '\n';
  return 0;
}

int cmd_preintegrate(const CommonArgs& args, const std::string& imu_path) {
  const Scenario sc = load_scenario(args);
  std::ifstream in(imu_path);
  if (!in) throw PreconditionError("cannot open IMU file '" + imu_path + "'");
  const std::vector<ImuSample> samples = read_imu_csv(in);
  const EarthModel earth;
  // Global increments are evaluated at the configured origin with the
  // frame rates and gravitation held over each window.
  const TruthSample origin = Trajectory(sc.trajectory, earth).at(0.0);
  const NavState ref = truth_state(earth, sc.variant, origin);
  const KinematicContext ctx = kinematic_context(earth, ref);
  nlohmann::json factors = nlohmann::json::array();
  const SchemeKind scheme = sc.schemes.back();
  double t = 0.0;
  for (std::size_t start = 0; start < samples.size(); start += sc.window) {
    Preintegrator pre(scheme, sc.sensor.initial_bias, sc.sensor.noise);
    GlobalIncrement global = GlobalIncrement::identity(sc.variant);
    for (std::size_t k = start; k < std::min(samples.size(), start + sc.window); ++k) {
      pre.integrate(samples[k]);
      global = compose_global(global_step(ctx, samples[k].dt), global);
    }
    factors.push_back(factor_to_json(pre.factor(t, global)));
    t += pre.increment().dt;
  }
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["scheme"] = std::string(to_string(scheme));
  j["factors"] = factors;
  write_json(args, "factors", j);
  std::cerr << "preintegrate: wrote " << factors.size() << " factors\n";
  return 0;
}

int cmd_compare(const CommonArgs& args, bool timing) {
  const Scenario sc = load_scenario(args);
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport rep = run_compare(sc);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (args.format == "csv") {
    auto os = open_output(args, "compare.csv");
    write_report_csv(os, rep);
  } else {
    nlohmann::json j = report_to_json(rep);
    if (timing) j["timing_s"] = elapsed;
    write_json(args, "compare", j);
  }
  for (const auto& r : rep.runs) {
    std::cerr << to_string(r.scheme) << ": position error " << r.final_error.position << " m, attitude error "
              << r.final_error.attitude_rad << " rad\n";
  }
  return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& what, const std::string& flip, std::uint64_t seed) {
  const VerifyReport rep = run_verify(what, seed, FaultInjection{flip});
  if (args.format == "csv") {
    auto os = open_output(args, "verify-" + what + ".csv");
    os << "name,value,tolerance,pass\n";
    for (const auto& c : rep.checks) {
      os << c.name << ',' << format_double(c.value) << ',' << format_double(c.tolerance) << ','
         << (c.pass ? "true" : "false") << '\n';
    }
  } else {
    write_json(args, "verify-" + what, verify_to_json(rep));
  }
  for (const auto& c : rep.checks) {
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (tol " << c.tolerance << ")\n";
  }
  return rep.pass() ? 0 : 1;
}

int cmd_monotonicity(const CommonArgs& args, const std::string& side_name) {
  const Scenario sc = load_scenario(args);
  const EarthModel earth;
  const ImuStream stream = synthesize_imu(sc.trajectory, sc.sensor, sc.seed, earth);
  const PerturbationSide side =
      side_name == "left" ? PerturbationSide::kLeftCommonFrame : PerturbationSide::kRightLocal;
  NavState st = truth_state(earth, sc.variant, stream.truth.front(), sc.sensor.initial_bias);
  Covariance9 sigma{Mat9::Zero(), side};
  std::vector<Mat9> chain{sigma.matrix};
  const SchemeKind scheme = sc.schemes.back();
  for (const auto& s : stream.samples) {
    const LocalIncrement u = local_step(scheme, s, st.bias);
    const PropagationStep step = propagate_step(earth, st, u);
    st = step.state;
    const TransitionMatrix a =
        side == PerturbationSide::kRightLocal ? transition_right(u) : transition_left(step.global);
    sigma = propagate_cov(sigma, a, noise_jacobian(s, st.bias), sc.sensor.noise.discrete_covariance(s.dt),
                          auxiliary_pose(earth, st));
    chain.push_back(sigma.matrix);
  }
  const MonotonicityReport rep = verify_monotonicity(chain);
  nlohmann::json j = monotonicity_to_json(rep);
  j["side"] = std::string(to_string(side));
  write_json(args, "monotonicity", j);
  std::cerr << "monotonicity: " << (rep.monotone() ? "monotone" : "violated") << " over " << chain.size()
            << " covariances\n";
  return rep.monotone() ? 0 : 1;
}

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "scenario configuration (key = value)");
  sub->add_option("--out", args.out, "output directory");
  sub->add_option("--format", args.format, "report format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simkit: simulate, preintegrate and verify extended-pose IMU models"};
  app.require_subcommand(1);

  CommonArgs sim_args, pre_args, cmp_args, ver_args, mon_args;
  auto* sim = app.add_subcommand("simulate", "synthesise IMU samples and truth from a scenario");
  add_common(sim, sim_args);

  std::string imu_path;
  auto* pre = app.add_subcommand("preintegrate", "build preintegration factors from an IMU CSV");
  add_common(pre, pre_args);
  pre->add_option("--imu", imu_path, "IMU CSV written by simulate")->required();

  bool timing = false;
  auto* cmp = app.add_subcommand("compare", "propagate every scheme against analytic truth");
  add_common(cmp, cmp_args);
  cmp->add_flag("--timing", timing, "include wall-clock timing in the JSON report");

  std::string what, flip;
  std::uint64_t seed = 7;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  add_common(ver, ver_args);
  ver->add_option("target", what, "group-axioms | jacobians | oracles | bias | monotonicity")
      ->required()
      ->check(CLI::IsMember({"group-axioms", "jacobians", "oracles", "bias", "monotonicity"}));
  ver->add_option("--seed", seed, "random seed");
  ver->add_option("--inject-sign-flip", flip, "negate a Jacobian block to exercise the failure path");

  std::string side = "right";
  auto* mon = app.add_subcommand("monotonicity", "check det(Sigma) along a simulated covariance chain");
  add_common(mon, mon_args);
  mon->add_option("--side", side, "perturbation side")->check(CLI::IsMember({"right", "left"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (pre->parsed()) return cmd_preintegrate(pre_args, imu_path);
    if (cmp->parsed()) return cmd_compare(cmp_args, timing);
    if (ver->parsed()) return cmd_verify(ver_args, what, flip, seed);
    if (mon->parsed()) return cmd_monotonicity(mon_args, side);
  } catch (const std::exception& e) {
    std::cerr << "simkit: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
