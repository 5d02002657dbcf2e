// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#include <gtest/gtest.h>

#include "se23nav/bias_update.hpp"
#include "se23nav/oracles.hpp"
#include "se23nav/simkit/random.hpp"

using namespace se23nav;
using se23nav::simkit::CounterRng;
using se23nav::simkit::random_gaussian3;

namespace {

std::vector<ImuSample> random_window(CounterRng& rng, int n, double dt) {
  std::vector<ImuSample> out;
  for (int k = 0; k < n; ++k) out.push_back(ImuSample::from_rates(dt, random_gaussian3(rng, 0.5), random_gaussian3(rng, 5.0)));
  return out;
}

}  // namespace

TEST(BiasJacobian, RecursiveMatchesClosedForm) {
  CounterRng rng(5, 1);
  for (int n : {1, 10, 1000}) {
    const auto window = random_window(rng, n, 0.005);
    const ImuBias b{random_gaussian3(rng, 0.01), random_gaussian3(rng, 0.1)};
    const BiasJacobian rec = bias_jacobian_recursive(window, b);
    const BiasJacobian closed = bias_jacobian_closed_form(window, b);
    EXPECT_LT((rec.matrix - closed.matrix).cwiseAbs().maxCoeff(), 1e-10) << n;
    EXPECT_EQ(rec.linearization.vector(), b.vector());
  }
}

TEST(BiasJacobian, MatchesFiniteDifferenceOfWindow) {
  CounterRng rng(5, 2);
  const auto window = random_window(rng, 50, 0.01);
  const ImuBias b{};
  const LocalIncrement base = preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, b);
  const std::function<Vec9(const Vec6&)> fn = [&](const Vec6& d) {
    return log_se23_vector(base.pose().inverse() *
                           preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, b + d).pose());
  };
  const Mat96 fd = oracle::central_difference<9, 6>(fn, 1e-6);
  const Mat96 j = bias_jacobian_recursive(window, b).matrix;
  EXPECT_LT((j - fd).norm(), 1e-6 * fd.norm());
}

TEST(BiasCorrection, SecondOrderRemainder) {
  CounterRng rng(5, 3);
  const auto window = random_window(rng, 200, 0.005);
  const ImuBias b{random_gaussian3(rng, 0.01), random_gaussian3(rng, 0.1)};
  const BiasJacobian j = bias_jacobian_recursive(window, b);
  const LocalIncrement base = preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, b);
  const Vec6 dir = (Vec6() << 1.0, -0.5, 0.3, 0.2, 0.1, -0.4).finished().normalized();
  const auto err = [&](double h) {
    const LocalIncrement exact = preintegrate_window(window, SchemeKind::kZeroOrderHoldBody, b + h * dir);
    return log_se23_vector(apply_bias_correction(base, j, h * dir).pose().inverse() * exact.pose()).norm();
  };
  EXPECT_NEAR(err(2e-3) / err(1e-3), 4.0, 0.3);
  EXPECT_EQ(with_clock(apply_bias_correction(base, j, Vec6::Zero())), with_clock(base));
}

TEST(BiasJacobian, StepRejectsLeftTransitions) {
  const BiasJacobian start{};
  const TransitionMatrix left{Mat9::Identity(), PerturbationSide::kLeftCommonFrame};
  EXPECT_THROW((void)bias_jacobian_step(start, left, Mat96::Zero()), VariantMismatchError);
}
