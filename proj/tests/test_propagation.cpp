// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#include <gtest/gtest.h>

#include "se23nav/oracles.hpp"
#include "se23nav/propagation.hpp"
#include "se23nav/simkit/random.hpp"

using namespace se23nav;
using se23nav::simkit::CounterRng;
using se23nav::simkit::random_ball3;
using se23nav::simkit::random_gaussian3;

namespace {

NavState state_at(FrameVariant v, CounterRng& rng) {
  const EarthModel earth;
  NavState s;
  s.variant = v;
  s.anchor = {0.5, 0.2, 30.0};
  s.pose = {so3_exp(random_ball3(rng, 2.5)), random_gaussian3(rng, 20.0),
            is_ned_family(v) ? earth.position_n(s.anchor) : earth.to_ecef(s.anchor)};
  return s;
}

constexpr std::array kVariants{FrameVariant::kNed, FrameVariant::kTransformedNed, FrameVariant::kEcef,
                               FrameVariant::kTransformedEcef};

}  // namespace

TEST(PropagateState, RejectsMismatchedInputs) {
  const EarthModel earth;
  CounterRng rng(4, 1);
  const NavState s = state_at(FrameVariant::kEcef, rng);
  const LocalIncrement u = local_step(SchemeKind::kZeroOrderHoldBody, ImuSample::from_rates(0.01, Vec3::Zero(), Vec3::Zero()));
  KinematicContext ctx = kinematic_context(earth, s);
  EXPECT_THROW((void)propagate_state(earth, s, global_step(ctx, 0.02), u), PreconditionError);
  ctx.variant = FrameVariant::kTransformedEcef;
  EXPECT_THROW((void)propagate_state(earth, s, global_step(ctx, 0.01), u), VariantMismatchError);
}

TEST(PropagateState, ExtractRecoversTheLocalIncrement) {
  const EarthModel earth;
  CounterRng rng(4, 2);
  for (FrameVariant v : kVariants) {
    const NavState ti = state_at(v, rng);
    const LocalIncrement u = local_step(SchemeKind::kZeroOrderHoldBody,
                                        ImuSample::from_rates(0.1, random_gaussian3(rng, 0.3), random_gaussian3(rng, 3.0)));
    const GlobalIncrement g = global_step(kinematic_context(earth, ti), u.dt);
    const NavState tj = propagate_state(earth, ti, g, u);
    const LocalIncrement back = extract_local_increment(earth, ti, tj, g);
    EXPECT_LT((back.rot - u.rot).norm(), 1e-12) << to_string(v);
    EXPECT_LT((back.vel - u.vel).norm(), 1e-8) << to_string(v);
    EXPECT_LT((back.pos - u.pos).norm(), 1e-8) << to_string(v);
    EXPECT_NEAR(tj.epoch, ti.epoch + 0.1, 1e-15);
  }
}

TEST(PropagateState, StaticTruthStaysPut) {
  // A body at rest on the rotating earth senses -g plus centripetal terms.
  const EarthModel earth;
  for (FrameVariant v : kVariants) {
    NavState s;
    s.variant = v;
    s.anchor = {0.7, 0.1, 100.0};
    const Mat3 c_ne = earth.ned_to_ecef(s.anchor);
    const Vec3 r_e = earth.to_ecef(s.anchor);
    s.pose.rot = is_ned_family(v) ? Mat3::Identity() : c_ne;
    s.pose.pos = is_ned_family(v) ? earth.position_n(s.anchor) : r_e;
    if (is_transformed(v)) s.pose.vel = frame_earth_rate(earth, s).cross(s.pose.pos);
    const Vec3 w_ie_e = earth.earth_rate_e();
    const Vec3 w_ib_b = c_ne.transpose() * w_ie_e;
    const Vec3 f_b = -(c_ne.transpose() * earth.gravity_e(r_e));
    const ImuSample imu = ImuSample::from_rates(0.01, w_ib_b, f_b);
    NavState st = s;
    for (int k = 0; k < 6000; ++k) st = propagate_step(earth, st, local_step(SchemeKind::kZeroOrderHoldBody, imu)).state;
    EXPECT_LT((st.pose.pos - s.pose.pos).norm(), 1e-6) << to_string(v);
    EXPECT_LT((st.pose.vel - s.pose.vel).norm(), 1e-7) << to_string(v);
  }
}

TEST(NoiseJacobian, MatchesFiniteDifference) {
  CounterRng rng(4, 3);
  for (int i = 0; i < 30; ++i) {
    const double dt = 0.05;
    const ImuSample s = ImuSample::from_rates(dt, random_gaussian3(rng, 1.0), random_gaussian3(rng, 5.0));
    const ExtendedPose inv = local_step(SchemeKind::kZeroOrderHoldBody, s).pose().inverse();
    const std::function<Vec9(const Vec6&)> fn = [&](const Vec6& n) {
      const ImuSample p = ImuSample::from_rates(dt, s.gyro - n.head<3>(), s.accel - n.tail<3>());
      return log_se23_vector(inv * local_step(SchemeKind::kZeroOrderHoldBody, p).pose());
    };
    const Mat96 fd = oracle::central_difference<9, 6>(fn, 1e-6);
    EXPECT_LT((noise_jacobian(s) - fd).norm(), 1e-7 * fd.norm());
  }
}

TEST(Transition, UnitDeterminantBothSides) {
  const EarthModel earth;
  CounterRng rng(4, 4);
  for (int i = 0; i < 100; ++i) {
    const NavState s = state_at(FrameVariant::kTransformedEcef, rng);
    const ImuSample imu = ImuSample::from_rates(0.01, random_gaussian3(rng), random_gaussian3(rng, 5.0));
    EXPECT_NEAR(transition_right(local_step(SchemeKind::kZeroOrderHoldBody, imu)).matrix.determinant(), 1.0, 1e-12);
    EXPECT_NEAR(transition_left(global_step(kinematic_context(earth, s), 0.01)).matrix.determinant(), 1.0, 1e-12);
  }
}

TEST(Covariance, RejectsNegativeNoiseAndSideMismatch) {
  const TransitionMatrix a = transition_right(LocalIncrement::identity());
  Mat6 q = Mat6::Identity();
  q(2, 2) = -1.0;
  EXPECT_THROW((void)propagate_cov(Covariance9{}, a, Mat96::Zero(), q), NonPsdError);
  const Covariance9 left{Mat9::Identity(), PerturbationSide::kLeftCommonFrame};
  EXPECT_THROW((void)propagate_cov(left, a, Mat96::Zero(), Mat6::Identity()), VariantMismatchError);
  const TransitionMatrix al{Mat9::Identity(), PerturbationSide::kLeftCommonFrame};
  EXPECT_THROW((void)propagate_cov(left, al, Mat96::Zero(), Mat6::Identity()), PreconditionError);
}

TEST(Covariance, ClipsRoundoffNegatives) {
  Mat9 almost = Mat9::Zero();
  almost(0, 0) = 1.0;
  almost(1, 1) = -1e-15;
  const Covariance9 out = propagate_cov(Covariance9{almost, PerturbationSide::kRightLocal},
                                        transition_right(LocalIncrement::identity()), Mat96::Zero(), Mat6::Zero());
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat9>(out.matrix).eigenvalues().minCoeff(), 0.0);
  almost(1, 1) = -1e-3;
  EXPECT_THROW((void)propagate_cov(Covariance9{almost, PerturbationSide::kRightLocal},
                                   transition_right(LocalIncrement::identity()), Mat96::Zero(), Mat6::Zero()),
               NonPsdError);
}

TEST(Covariance, BatchEqualsRecursive) {
  CounterRng rng(4, 5);
  const NoiseParams noise{1e-5, 1e-3, {}, {}};
  std::vector<CovarianceStep> steps;
  Covariance9 rec{Mat9::Identity() * 1e-4, PerturbationSide::kRightLocal};
  const Covariance9 start = rec;
  for (int k = 0; k < 50; ++k) {
    const ImuSample s = ImuSample::from_rates(0.01, random_gaussian3(rng), random_gaussian3(rng, 5.0));
    const TransitionMatrix a = transition_right(local_step(SchemeKind::kZeroOrderHoldBody, s));
    steps.push_back({a.matrix, noise_jacobian(s)});
    rec = propagate_cov(rec, a, noise_jacobian(s), noise.discrete_covariance(0.01));
  }
  const Covariance9 batch = batch_covariance(start, steps, noise.discrete_covariance(0.01));
  EXPECT_LT((batch.matrix - rec.matrix).norm(), 1e-12 * rec.matrix.norm());
  EXPECT_EQ(transition_product(steps, 3, 3), Mat9::Identity());
}

TEST(Covariance, SidesAgreeThroughAdjoint) {
  // Right- and left-side propagation describe the same distribution.
  const EarthModel earth;
  CounterRng rng(4, 6);
  NavState st = state_at(FrameVariant::kTransformedEcef, rng);
  const NoiseParams noise{1e-5, 1e-3, {}, {}};
  Covariance9 right{Mat9::Identity() * 1e-4, PerturbationSide::kRightLocal};
  Covariance9 left = convert_side(right, st.pose);
  for (int k = 0; k < 50; ++k) {
    const ImuSample s = ImuSample::from_rates(0.01, random_gaussian3(rng), random_gaussian3(rng, 5.0));
    const LocalIncrement u = local_step(SchemeKind::kZeroOrderHoldBody, s);
    const GlobalIncrement g = global_step(kinematic_context(earth, st), s.dt);
    st = propagate_state(earth, st, g, u);
    right = propagate_cov(right, transition_right(u), noise_jacobian(s), noise.discrete_covariance(s.dt));
    left = propagate_cov(left, transition_left(g), noise_jacobian(s), noise.discrete_covariance(s.dt), st.pose);
  }
  const Mat9 mapped = convert_side(right, st.pose).matrix;
  EXPECT_LT((mapped - left.matrix).norm(), 1e-9 * left.matrix.norm());
  // The round trip passes through entries scaled by |r|^2, so roundoff is
  // bounded relative to the left-side matrix.
  const Covariance9 back = convert_side(convert_side(right, st.pose), st.pose);
  EXPECT_LT((back.matrix - right.matrix).norm(), 1e-14 * left.matrix.norm());
}

TEST(PropagateStep, TrapezoidAgreesWithStartRuleForShortSteps) {
  const EarthModel earth;
  CounterRng rng(4, 7);
  const NavState s = state_at(FrameVariant::kNed, rng);
  const LocalIncrement u = local_step(SchemeKind::kZeroOrderHoldBody,
                                      ImuSample::from_rates(0.01, random_gaussian3(rng, 0.1), random_gaussian3(rng, 3.0)));
  const NavState a = propagate_step(earth, s, u, ContextRule::kStart).state;
  const NavState b = propagate_step(earth, s, u, ContextRule::kTrapezoid).state;
  EXPECT_LT((a.pose.pos - b.pose.pos).norm(), 1e-3);
  EXPECT_GT((a.pose.pos - b.pose.pos).norm(), 0.0);
}
