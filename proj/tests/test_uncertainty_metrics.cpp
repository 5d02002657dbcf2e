// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "se23nav/uncertainty_metrics.hpp"
#include "se23nav/simkit/rng.hpp"

using namespace se23nav;

namespace {

Mat9 random_spd(simkit::CounterRng& rng, double scale) {
  Mat9 l;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) l(i, j) = scale * rng.gaussian();
  return l * l.transpose() + scale * scale * Mat9::Identity();
}

}  // namespace

TEST(LogDet, MatchesEigenvalueSum) {
  simkit::CounterRng rng(7, 1);
  for (int i = 0; i < 20; ++i) {
    const Mat9 s = random_spd(rng, 0.1);
    const auto eig = Eigen::SelfAdjointEigenSolver<Mat9>(s).eigenvalues();
    EXPECT_NEAR(log_det_psd<9>(s), eig.array().log().sum(), 1e-10);
  }
}

TEST(LogDet, SingularGivesMinusInfinityAndIndefiniteThrows) {
  EXPECT_EQ(log_det_psd<9>(Mat9::Zero()), -std::numeric_limits<double>::infinity());
  Mat9 s = Mat9::Identity();
  s(4, 4) = 0.0;
  EXPECT_EQ(log_det_psd<9>(s), -std::numeric_limits<double>::infinity());
  s(4, 4) = -0.5;
  EXPECT_THROW((void)log_det_psd<9>(s), NonPsdError);
}

TEST(Criterion, ClosedFormValuesOnScaledIdentity) {
  const Mat9 s = 4.0 * Mat9::Identity();
  EXPECT_NEAR(criterion_value(UncertaintyCriterion::d_opt(), s), 4.0, 1e-14);
  EXPECT_NEAR(criterion_value(UncertaintyCriterion::a_opt(), s), 36.0, 1e-14);
  EXPECT_NEAR(criterion_value(UncertaintyCriterion::e_opt(), s), 4.0, 1e-13);
  const double alpha = 2.0;
  const double expected = 4.5 * (std::log(2.0 * std::numbers::pi) + std::log(alpha) / (alpha - 1.0)) + 4.5 * std::log(4.0);
  EXPECT_NEAR(criterion_value(UncertaintyCriterion::renyi(alpha), s), expected, 1e-12);
}

TEST(Criterion, RenyiOrderValidation) {
  EXPECT_THROW((void)UncertaintyCriterion::renyi(1.0), PreconditionError);
  EXPECT_THROW((void)UncertaintyCriterion::renyi(-1.0), PreconditionError);
  EXPECT_EQ(criterion_value(UncertaintyCriterion::renyi(0.0), Mat9::Identity()),
            std::numeric_limits<double>::infinity());
}

TEST(Criterion, RenyiDifferenceIsHalfLogDetRatio) {
  simkit::CounterRng rng(7, 2);
  for (int i = 0; i < 20; ++i) {
    const Mat9 a = random_spd(rng, 0.1), b = random_spd(rng, 0.2);
    const double half = 0.5 * (log_det_psd<9>(b) - log_det_psd<9>(a));
    for (double alpha : {0.5, 2.0, 10.0}) {
      const auto c = UncertaintyCriterion::renyi(alpha);
      EXPECT_NEAR(criterion_value(c, b) - criterion_value(c, a), half, 1e-12);
    }
  }
}

TEST(Monotonicity, AddingNoiseNeverDecreasesDeterminant) {
  simkit::CounterRng rng(7, 3);
  std::vector<Mat9> chain{random_spd(rng, 0.1)};
  for (int k = 0; k < 200; ++k) {
    Eigen::Matrix<double, 9, 6> g;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 6; ++j) g(i, j) = 0.01 * rng.gaussian();
    chain.push_back(chain.back() + g * g.transpose());
  }
  const MonotonicityReport rep = verify_monotonicity(chain);
  EXPECT_TRUE(rep.monotone());
  EXPECT_EQ(rep.log_dets.size(), chain.size());
  EXPECT_FALSE(rep.first_violation().has_value());
}

TEST(Monotonicity, ReportsCorruptedIndex) {
  std::vector<Mat9> chain;
  for (int k = 0; k < 10; ++k) chain.push_back((1.0 + 0.1 * k) * Mat9::Identity());
  chain[6] *= 0.5;
  const MonotonicityReport rep = verify_monotonicity(chain);
  ASSERT_FALSE(rep.monotone());
  EXPECT_EQ(rep.first_violation().value(), 6u);
  EXPECT_LT(rep.violations.front().log_det_after, rep.violations.front().log_det_before);
}

TEST(Monotonicity, StartFromZeroCovarianceIsAccepted) {
  std::vector<Mat9> chain{Mat9::Zero(), Mat9::Identity() * 1e-8, Mat9::Identity() * 1e-6};
  EXPECT_TRUE(verify_monotonicity(chain).monotone());
}
