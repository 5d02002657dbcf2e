// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#include <gtest/gtest.h>

#include "se23nav/increments.hpp"
#include "se23nav/oracles.hpp"
#include "se23nav/simkit/random.hpp"

using namespace se23nav;
using se23nav::simkit::CounterRng;
using se23nav::simkit::random_gaussian3;

namespace {

KinematicContext ecef_context() {
  const EarthModel earth;
  return kinematic_context(earth, FrameVariant::kTransformedEcef,
                           ExtendedPose{Mat3::Identity(), Vec3::Zero(), earth.to_ecef({0.3, -0.5, 10.0})});
}

ImuSample split_sample(double dt, const Vec3& w1, const Vec3& w2, const Vec3& f1, const Vec3& f2) {
  const double h = 0.5 * dt;
  const SubIncrements sub{w1 * h, w2 * h, f1 * h, f2 * h};
  return ImuSample::from_increments(dt, sub.dtheta1 + sub.dtheta2, sub.dv1 + sub.dv2, sub);
}

}  // namespace

TEST(Scheme, NamesRoundTrip) {
  for (SchemeKind s : {SchemeKind::kConstantGlobalAccel, SchemeKind::kZeroOrderHoldBody,
                       SchemeKind::kTwoSampleCompensated}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_THROW((void)parse_scheme("rk4"), PreconditionError);
}

TEST(GlobalStep, MatchesRk4OfFrameDynamics) {
  const KinematicContext ctx = ecef_context();
  for (double horizon : {0.01, 1.0, 30.0}) {
    const Mat5 ref = oracle::global_increment_rk4(ctx.frame_rate, ctx.gravitation, horizon, 20000);
    const GlobalIncrement g = global_step(ctx, horizon);
    EXPECT_LT((g.pos - ref.block<3, 1>(0, 4)).norm(), 1e-9 * std::max(1.0, horizon * horizon));
    EXPECT_LT((g.vel - ref.block<3, 1>(0, 3)).norm(), 1e-10 * std::max(1.0, horizon));
    EXPECT_LT((g.rot - ref.block<3, 3>(0, 0)).norm(), 1e-12);
  }
}

TEST(GlobalStep, CompositionOfStepsEqualsOneStep) {
  const KinematicContext ctx = ecef_context();
  GlobalIncrement acc = GlobalIncrement::identity(ctx.variant);
  for (int k = 0; k < 100; ++k) acc = compose_global(global_step(ctx, 0.01), acc);
  const GlobalIncrement one = global_step(ctx, 1.0);
  EXPECT_NEAR(acc.dt, 1.0, 1e-14);
  EXPECT_LT((acc.pos - one.pos).norm(), 1e-10);
  EXPECT_LT((acc.vel - one.vel).norm(), 1e-11);
  EXPECT_LT((acc.rot - one.rot).norm(), 1e-14);
}

TEST(GlobalStep, PreconditionsAndVariantChecks) {
  const KinematicContext ctx = ecef_context();
  EXPECT_THROW((void)global_step(ctx, 0.0), PreconditionError);
  EXPECT_THROW((void)global_step_ned(ctx, 0.1), VariantMismatchError);
  EXPECT_NO_THROW((void)global_step_ecef(ctx, 0.1));
  EXPECT_THROW((void)compose_global(GlobalIncrement::identity(FrameVariant::kNed), global_step(ctx, 0.1)),
               VariantMismatchError);
  EXPECT_THROW((void)gamma_prime(global_step(ctx, 0.1), Vec3::Zero(), Vec3::Zero()), VariantMismatchError);
}

TEST(GammaPrime, ShiftsVelocityOnly) {
  KinematicContext ctx = ecef_context();
  ctx.variant = FrameVariant::kEcef;
  const GlobalIncrement g = global_step(ctx, 0.5);
  const Vec3 w(0.0, 0.0, 7.292115e-5), r(6.4e6, 0.0, 0.0);
  const GlobalIncrement p = gamma_prime(g, w, r);
  EXPECT_EQ(p.rot, g.rot);
  EXPECT_EQ(p.pos, g.pos);
  EXPECT_LT((g.vel - p.vel - w.cross(r)).norm(), 1e-9);
}

TEST(LocalStep, ZeroOrderHoldExactForConstantRates) {
  CounterRng rng(3, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 w = random_gaussian3(rng, 0.5), f = random_gaussian3(rng, 5.0);
    const Mat5 ref = oracle::local_increment_rk4(w, f, 0.5, 5000);
    const LocalIncrement u = local_step(SchemeKind::kZeroOrderHoldBody, ImuSample::from_rates(0.5, w, f));
    EXPECT_LT((u.pose().matrix() - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LocalStep, SchemesAgreeWithoutRotation) {
  const ImuSample s = split_sample(0.01, Vec3::Zero(), Vec3::Zero(), Vec3(1, 2, 3), Vec3(1, 2, 3));
  const LocalIncrement a = local_step(SchemeKind::kConstantGlobalAccel, s);
  const LocalIncrement b = local_step(SchemeKind::kZeroOrderHoldBody, s);
  const LocalIncrement c = local_step(SchemeKind::kTwoSampleCompensated, s);
  EXPECT_LT((a.pose().matrix() - b.pose().matrix()).norm(), 1e-15);
  EXPECT_LT((b.pose().matrix() - c.pose().matrix()).norm(), 1e-15);
}

TEST(LocalStep, TwoSampleNeedsSubIncrements) {
  const ImuSample s = ImuSample::from_rates(0.01, Vec3::Ones(), Vec3::Ones());
  EXPECT_THROW((void)local_step(SchemeKind::kTwoSampleCompensated, s), PreconditionError);
}

TEST(LocalStep, RejectsInvalidSamples) {
  EXPECT_THROW((void)local_step(SchemeKind::kZeroOrderHoldBody, ImuSample::from_rates(0.0, Vec3::Zero(), Vec3::Zero())),
               PreconditionError);
  ImuSample bad = ImuSample::from_rates(0.01, Vec3::Zero(), Vec3::Zero());
  bad.gyro.x() = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW((void)local_step(SchemeKind::kZeroOrderHoldBody, bad), PreconditionError);
  const SubIncrements sub{Vec3::Ones(), Vec3::Ones(), Vec3::Zero(), Vec3::Zero()};
  EXPECT_THROW((void)local_step(SchemeKind::kTwoSampleCompensated,
                                ImuSample::from_increments(0.01, Vec3::Ones(), Vec3::Zero(), sub)),
               PreconditionError);
}

TEST(LocalStep, TwoSampleReducesErrorForLinearlyVaryingRate) {
  // Rate w(t) = a + b t; truth by RK4 on the continuous rate.
  const Vec3 a(0.4, -0.1, 0.2), b(0.0, 3.0, -2.0), f(0.0, 0.0, -9.8);
  const double dt = 0.02;
  Mat5 x = Mat5::Identity();
  const auto rhs = [&](double t, const Mat5& m) {
    Mat5 d = Mat5::Zero();
    d.block<3, 3>(0, 0) = m.block<3, 3>(0, 0) * skew(Vec3(a + b * t));
    d.block<3, 1>(0, 3) = m.block<3, 3>(0, 0) * f;
    d.block<3, 1>(0, 4) = m.block<3, 1>(0, 3);
    return d;
  };
  x = oracle::rk4_matrix(rhs, x, 0.0, dt, 2000);
  const Vec3 w1 = a + b * (0.25 * dt), w2 = a + b * (0.75 * dt);  // exact half-interval means
  const ImuSample s = split_sample(dt, w1, w2, f, f);
  const double e2 = so3_log(x.block<3, 3>(0, 0).transpose() * local_step(SchemeKind::kZeroOrderHoldBody, s).rot).norm();
  const double e3 =
      so3_log(x.block<3, 3>(0, 0).transpose() * local_step(SchemeKind::kTwoSampleCompensated, s).rot).norm();
  EXPECT_LT(e3, 0.2 * e2);
}

TEST(LocalStep, BiasIsRemovedBeforeIntegration) {
  const ImuBias b{Vec3(0.01, 0.0, -0.02), Vec3(0.1, 0.2, 0.3)};
  const Vec3 w(0.1, 0.2, 0.3), f(1.0, 0.0, -9.0);
  const LocalIncrement with_bias = local_step(SchemeKind::kZeroOrderHoldBody, ImuSample::from_rates(0.01, w, f), b);
  const LocalIncrement clean =
      local_step(SchemeKind::kZeroOrderHoldBody, ImuSample::from_rates(0.01, w - b.gyro, f - b.accel));
  EXPECT_LT((with_bias.pose().matrix() - clean.pose().matrix()).norm(), 1e-16);
}

TEST(ComposeLocal, AssociativeWithCoarsestTag) {
  CounterRng rng(3, 2);
  const auto step = [&](SchemeKind k) {
    return local_step(k, split_sample(0.01, random_gaussian3(rng), random_gaussian3(rng), random_gaussian3(rng),
                                      random_gaussian3(rng)));
  };
  const LocalIncrement a = step(SchemeKind::kTwoSampleCompensated);
  const LocalIncrement b = step(SchemeKind::kZeroOrderHoldBody);
  const LocalIncrement c = step(SchemeKind::kTwoSampleCompensated);
  const LocalIncrement left = compose_local(compose_local(a, b), c);
  const LocalIncrement right = compose_local(a, compose_local(b, c));
  EXPECT_LT((with_clock(left) - with_clock(right)).norm(), 1e-14);
  EXPECT_EQ(left.scheme, SchemeKind::kZeroOrderHoldBody);
  EXPECT_EQ(compose_local(LocalIncrement::identity(SchemeKind::kConstantGlobalAccel), a).scheme, a.scheme);
}

TEST(ComposeLocal, ClockAugmentedProductIsHomomorphic) {
  CounterRng rng(3, 3);
  const LocalIncrement a = local_step(SchemeKind::kZeroOrderHoldBody,
                                      ImuSample::from_rates(0.01, random_gaussian3(rng), random_gaussian3(rng)));
  const LocalIncrement b = local_step(SchemeKind::kZeroOrderHoldBody,
                                      ImuSample::from_rates(0.02, random_gaussian3(rng), random_gaussian3(rng)));
  EXPECT_LT((with_clock(compose_local(a, b)) - with_clock(a) * with_clock(b)).norm(), 1e-15);
}

TEST(PreintegrateWindow, FoldsSamples) {
  CounterRng rng(3, 4);
  std::vector<ImuSample> window;
  for (int k = 0; k < 10; ++k) window.push_back(ImuSample::from_rates(0.01, random_gaussian3(rng), random_gaussian3(rng)));
  LocalIncrement acc = LocalIncrement::identity();
  for (const auto& s : window) acc = compose_local(acc, local_step(SchemeKind::kZeroOrderHoldBody, s));
  const LocalIncrement w = preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, ImuBias{});
  EXPECT_EQ(with_clock(w), with_clock(acc));
}
