// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#include <gtest/gtest.h>

#include <numbers>

#include "se23nav/oracles.hpp"
#include "se23nav/se23_core.hpp"
#include "se23nav/simkit/random.hpp"

using namespace se23nav;
using se23nav::simkit::CounterRng;
using se23nav::simkit::random_ball3;
using se23nav::simkit::random_pose;
using se23nav::simkit::random_tangent;

namespace {

Mat9 exp_jacobian_fd(const Tangent9& xi) {
  // d/de Log(Exp(xi + e) Exp(xi)^-1), the left Jacobian.
  const ExtendedPose base_inv = exp_se23(xi).inverse();
  const std::function<Vec9(const Vec9&)> fn = [&](const Vec9& e) {
    return log_se23_vector(exp_se23(Vec9(xi.vector() + e)) * base_inv);
  };
  return oracle::central_difference<9, 9>(fn, 1e-6);
}

}  // namespace

TEST(Gamma, MatchesPowerSeriesAcrossAngles) {
  CounterRng rng(1, 1);
  for (double radius : {0.0, 1e-9, 1e-5, 0.3, 0.99, 1.01, 2.0, 3.1}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vec3 phi = random_ball3(rng, 1.0).normalized() * radius;
      for (int m = 0; m <= 3; ++m) {
        EXPECT_LT((gamma(m, phi) - oracle::gamma_series(m, phi)).norm(), 1e-14) << "m=" << m << " r=" << radius;
      }
    }
  }
}

TEST(Gamma, RecurrenceAndSymmetryIdentities) {
  CounterRng rng(1, 2);
  for (int i = 0; i < 500; ++i) {
    const Vec3 phi = random_ball3(rng, std::numbers::pi);
    const Mat3 c = so3_exp(random_ball3(rng, 3.0));
    EXPECT_LT((gamma<2>(phi) * skew(phi) + Mat3::Identity() - gamma<1>(phi)).norm(), 1e-12);
    for (int m = 0; m <= 3; ++m) {
      EXPECT_LT((gamma(m, Vec3(-phi)) - gamma(m, phi).transpose()).norm(), 1e-12);
      EXPECT_LT((c * gamma(m, phi) * c.transpose() - gamma(m, Vec3(c * phi))).norm(), 1e-12);
    }
  }
}

TEST(Gamma, RejectsUnsupportedOrder) {
  EXPECT_THROW((void)gamma(4, Vec3::Zero()), std::out_of_range);
  EXPECT_THROW((void)gamma(-1, Vec3::Zero()), std::out_of_range);
}

TEST(Gamma, DirectionalJacobianMatchesFiniteDifference) {
  CounterRng rng(1, 3);
  for (int i = 0; i < 50; ++i) {
    const Vec3 phi = random_ball3(rng, 3.0);
    const Vec3 f = random_ball3(rng, 10.0);
    for (int m = 0; m <= 2; ++m) {
      const std::function<Vec3(const Vec3&)> fn = [&](const Vec3& d) { return Vec3(gamma(m, Vec3(phi + d)) * f); };
      const Mat3 fd = oracle::central_difference<3, 3>(fn, 1e-6);
      EXPECT_LT((gamma_directional_jacobian(m, phi, f) - fd).norm(), 1e-7 * std::max(1.0, fd.norm()));
    }
  }
}

TEST(So3, LogInvertsExpUpToTheBranch) {
  CounterRng rng(1, 4);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 phi = random_ball3(rng, std::numbers::pi - 1e-3);
    EXPECT_LT((so3_log(so3_exp(phi)) - phi).norm(), 1e-10);
  }
  EXPECT_LT(so3_log(Mat3::Identity()).norm(), 1e-300);
}

TEST(So3, LogAtHalfTurnThrows) {
  const Mat3 half_turn = so3_exp(Vec3(0.0, 0.0, std::numbers::pi));
  EXPECT_THROW((void)so3_log(half_turn), BranchSingularityError);
}

TEST(So3, NearestRotationIsOrthonormal) {
  Mat3 noisy = so3_exp(Vec3(0.3, -0.2, 0.1));
  noisy(0, 1) += 1e-4;
  const Mat3 r = nearest_rotation(noisy);
  EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-14);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
}

TEST(ExtendedPose, GroupAxioms) {
  CounterRng rng(1, 5);
  for (int i = 0; i < 500; ++i) {
    const ExtendedPose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    EXPECT_LT(((a * b) * c).matrix().isApprox((a * (b * c)).matrix(), 1e-12) ? 0.0 : 1.0, 0.5);
    EXPECT_LT(((a * a.inverse()).matrix() - Mat5::Identity()).norm(), 1e-12);
    EXPECT_LT(((a * ExtendedPose::identity()).matrix() - a.matrix()).norm(), 1e-300);
    EXPECT_TRUE(a.is_valid());
  }
}

TEST(ExtendedPose, MatrixRoundTrip) {
  CounterRng rng(1, 6);
  const ExtendedPose a = random_pose(rng);
  EXPECT_EQ(ExtendedPose::from_matrix(a.matrix()).matrix(), a.matrix());
}

TEST(Se23, ExpMatchesMatrixExponentialSeries) {
  CounterRng rng(1, 7);
  for (int i = 0; i < 200; ++i) {
    const Tangent9 xi = random_tangent(rng, 2.0, 1.0);
    EXPECT_LT((exp_se23(xi).matrix() - oracle::matrix_exp_series(hat(xi), 60)).norm(), 1e-11);
  }
}

TEST(Se23, LogRoundTrip) {
  CounterRng rng(1, 8);
  for (int i = 0; i < 2000; ++i) {
    const Tangent9 xi = random_tangent(rng, std::numbers::pi - 0.01, 5.0);
    EXPECT_LT((log_se23_vector(exp_se23(xi)) - xi.vector()).norm(), 1e-10);
  }
}

TEST(Se23, VeeRejectsMalformedAlgebraElement) {
  Mat5 m = hat(Tangent9{Vec3(0.1, 0.2, 0.3), Vec3::Ones(), Vec3::Ones()});
  EXPECT_NO_THROW((void)vee(m));
  m(3, 3) = 1e-3;
  EXPECT_THROW((void)vee(m), MalformedAlgebraError);
  m(3, 3) = 0.0;
  m(0, 1) += 1e-3;  // no longer skew
  EXPECT_THROW((void)vee(m), MalformedAlgebraError);
}

TEST(Se23, AdjointConjugatesTheExponential) {
  CounterRng rng(1, 9);
  for (int i = 0; i < 200; ++i) {
    const ExtendedPose t = random_pose(rng);
    const Tangent9 xi = random_tangent(rng, 1.0, 1.0);
    const Mat5 lhs = (t * exp_se23(xi) * t.inverse()).matrix();
    const Mat5 rhs = exp_se23(Vec9(adjoint(t) * xi.vector())).matrix();
    EXPECT_LT((lhs - rhs).norm(), 1e-9);
  }
}

TEST(Se23, AlgebraAdjointIsBracket) {
  CounterRng rng(1, 10);
  const Tangent9 a = random_tangent(rng, 1.0, 1.0), b = random_tangent(rng, 1.0, 1.0);
  const Mat5 bracket = hat(a) * hat(b) - hat(b) * hat(a);
  EXPECT_LT((vee(bracket).vector() - algebra_adjoint(a) * b.vector()).norm(), 1e-13);
}

TEST(Se23, LeftJacobianMatchesFiniteDifference) {
  CounterRng rng(1, 11);
  for (int i = 0; i < 30; ++i) {
    const Tangent9 xi = random_tangent(rng, 2.5, 2.0);
    const Mat9 fd = exp_jacobian_fd(xi);
    EXPECT_LT((left_jacobian_se23(xi) - fd).norm(), 1e-7 * fd.norm());
    EXPECT_LT((left_jacobian_inverse_se23(xi) * left_jacobian_se23(xi) - Mat9::Identity()).norm(), 1e-10);
    const Tangent9 neg = Tangent9::from_vector(-xi.vector());
    EXPECT_LT((right_jacobian_se23(xi) - left_jacobian_se23(neg)).norm(), 1e-14);
    EXPECT_LT((right_jacobian_inverse_se23(xi) * right_jacobian_se23(xi) - Mat9::Identity()).norm(), 1e-10);
  }
}

TEST(Automorphism, PreservesProductsAndInverses) {
  CounterRng rng(1, 12);
  for (int i = 0; i < 100; ++i) {
    const ExtendedPose a = random_pose(rng), b = random_pose(rng);
    const double dt = rng.uniform();
    EXPECT_LT((phi_auto(dt, a * b).matrix() - (phi_auto(dt, a) * phi_auto(dt, b)).matrix()).norm(), 1e-10);
    EXPECT_LT((phi_auto(dt, a.inverse()).matrix() - phi_auto(dt, a).inverse().matrix()).norm(), 1e-10);
  }
}

TEST(Automorphism, LogLinearity) {
  CounterRng rng(1, 13);
  for (int i = 0; i < 100; ++i) {
    const Tangent9 xi = random_tangent(rng, 2.0, 2.0);
    const double dt = 0.5 * rng.uniform();
    const Mat9 f = AutomorphismF{dt}.matrix();
    EXPECT_LT((phi_auto(dt, exp_se23(xi)).matrix() - exp_se23(Vec9(f * xi.vector())).matrix()).norm(), 1e-12);
  }
  EXPECT_LT((AutomorphismF{0.1}.then(AutomorphismF{0.2}).matrix() -
             AutomorphismF{0.2}.matrix() * AutomorphismF{0.1}.matrix())
                .norm(),
            1e-15);
}

TEST(Bch, FirstOrderSplitOfExponential) {
  CounterRng rng(1, 14);
  const Vec3 phi = random_ball3(rng, 2.0);
  const Vec3 dir = random_ball3(rng, 1.0).normalized();
  // Error of the split is O(h^2): halving h must quarter it.
  const auto err = [&](double h, SmallArgument which) {
    const Vec3 small = h * dir;
    const Mat3 exact = so3_exp(Vec3(phi + small));
    const Mat3 split = which == SmallArgument::kFirst ? bch_gamma(0, small, phi, which) : bch_gamma(0, phi, small, which);
    return (exact - split).norm();
  };
  for (SmallArgument which : {SmallArgument::kFirst, SmallArgument::kSecond}) {
    const double ratio = err(1e-3, which) / err(5e-4, which);
    EXPECT_NEAR(ratio, 4.0, 0.2);
  }
  EXPECT_THROW((void)bch_gamma(3, phi, phi, SmallArgument::kFirst), std::out_of_range);
}
