// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "se23nav/errors.hpp"

namespace se23nav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat96 = Eigen::Matrix<double, 9, 6>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// @brief Cross-product matrix of w.
[[nodiscard]] inline Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

/// @brief Inverse of skew(); reads the antisymmetric part only.
[[nodiscard]] inline Vec3 unskew(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

/// Element of the 9-dimensional Lie algebra: rotation, velocity and
/// position generators.
struct Tangent9 {
  Vec3 rot = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 pos = Vec3::Zero();

  [[nodiscard]] Vec9 vector() const {
    Vec9 out;
    out << rot, vel, pos;
    return out;
  }
  [[nodiscard]] static Tangent9 from_vector(const Vec9& x) {
    return {x.segment<3>(0), x.segment<3>(3), x.segment<3>(6)};
  }
};

namespace detail {

// Below this angle the Gamma coefficients are summed as Taylor series; the
// closed forms lose digits to cancellation for small angles.
inline constexpr double kSeriesThreshold = 1.0;
inline constexpr double kSlopeSeriesThreshold = 2.0;
inline constexpr int kSeriesTerms = 30;

inline double inverse_factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return 1.0 / f;
}

// c_n(t) = sum_k (-1)^k t^(2k) / (2k+n)!
inline double gamma_coeff_series(int n, double theta) {
  const double t2 = theta * theta;
  double term = inverse_factorial(n);
  double sum = term;
  for (int k = 1; k < kSeriesTerms; ++k) {
    term *= -t2 / ((2.0 * k + n - 1.0) * (2.0 * k + n));
    sum += term;
    if (std::abs(term) < 1e-20 * std::abs(sum)) break;
  }
  return sum;
}

// Recurrence c_n = (1/(n-2)! - c_{n-2}) / t^2 seeded with cos and sinc.
inline double gamma_coeff_closed(int n, double theta) {
  const double t2 = theta * theta;
  double even = std::cos(theta);
  double odd = std::sin(theta) / theta;
  if (n == 0) return even;
  if (n == 1) return odd;
  for (int k = 2; k <= n; ++k) {
    const double next = (inverse_factorial(k - 2) - ((k % 2 == 0) ? even : odd)) / t2;
    if (k % 2 == 0) even = next; else odd = next;
  }
  return (n % 2 == 0) ? even : odd;
}

inline double gamma_coeff(int n, double theta) {
  return theta < kSeriesThreshold ? gamma_coeff_series(n, theta) : gamma_coeff_closed(n, theta);
}

// s_n(t) = (1/t) dc_n/dt = sum_{k>=1} (-1)^k 2k t^(2k-2) / (2k+n)!
inline double gamma_slope_series(int n, double theta) {
  const double t2 = theta * theta;
  double power = 1.0;  // t^(2k-2)
  double inv_fact = inverse_factorial(n + 2);
  double sum = 0.0;
  for (int k = 1; k < kSeriesTerms; ++k) {
    const double term = ((k % 2 == 0) ? 1.0 : -1.0) * 2.0 * k * power * inv_fact;
    sum += term;
    if (k > 2 && std::abs(term) < 1e-20 * std::abs(sum)) break;
    power *= t2;
    inv_fact /= (2.0 * k + n + 1.0) * (2.0 * k + n + 2.0);
  }
  return sum;
}

inline double gamma_slope_closed(int n, double theta) {
  return (gamma_coeff_closed(n - 1, theta) - n * gamma_coeff_closed(n, theta)) / (theta * theta);
}

inline double gamma_slope(int n, double theta) {
  return theta < kSlopeSeriesThreshold ? gamma_slope_series(n, theta) : gamma_slope_closed(n, theta);
}

inline void check_gamma_order(int m) {
  if (m < 0 || m > 3) throw std::out_of_range("Gamma order must lie in [0, 3], got " + std::to_string(m));
}

}  // namespace detail

/// @brief Gamma_m(phi) = sum_n (phi^)^n / (n+m)!; Gamma_0 is the rotation
/// exponential and Gamma_1 its left Jacobian.
[[nodiscard]] inline Mat3 gamma(int m, const Vec3& phi) {
  detail::check_gamma_order(m);
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  return detail::inverse_factorial(m) * Mat3::Identity() +
         detail::gamma_coeff(m + 1, theta) * k + detail::gamma_coeff(m + 2, theta) * k * k;
}

template <int M>
[[nodiscard]] Mat3 gamma(const Vec3& phi) {
  static_assert(M >= 0 && M <= 3, "Gamma order must lie in [0, 3]");
  return gamma(M, phi);
}

/// @brief d(Gamma_m(phi) f)/d(phi).
[[nodiscard]] inline Mat3 gamma_directional_jacobian(int m, const Vec3& phi, const Vec3& f) {
  detail::check_gamma_order(m);
  const double theta = phi.norm();
  const Vec3 pf = phi.cross(f);
  const Vec3 ppf = phi.cross(pf);
  const Mat3 dppf = phi * f.transpose() + phi.dot(f) * Mat3::Identity() - 2.0 * f * phi.transpose();
  return detail::gamma_slope(m + 1, theta) * pf * phi.transpose() -
         detail::gamma_coeff(m + 1, theta) * skew(f) +
         detail::gamma_slope(m + 2, theta) * ppf * phi.transpose() +
         detail::gamma_coeff(m + 2, theta) * dppf;
}

[[nodiscard]] inline Mat3 so3_exp(const Vec3& phi) { return gamma<0>(phi); }

inline constexpr double kLogBranchMargin = 1e-7;

/// @brief Principal rotation vector of C. Throws near the pi branch cut.
[[nodiscard]] inline Vec3 so3_log(const Mat3& c) {
  const Vec3 w(c(2, 1) - c(1, 2), c(0, 2) - c(2, 0), c(1, 0) - c(0, 1));
  const double cos_t = std::clamp(0.5 * (c.trace() - 1.0), -1.0, 1.0);
  const double sin_t = 0.5 * w.norm();
  const double theta = std::atan2(sin_t, cos_t);
  if (theta > std::numbers::pi - kLogBranchMargin) {
    throw BranchSingularityError("rotation angle within " + std::to_string(kLogBranchMargin) + " of pi");
  }
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    return 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * w;
  }
  if (theta < 3.0) return (0.5 * theta / sin_t) * w;
  // Near pi the antisymmetric part vanishes; take the axis from the symmetric part.
  const Mat3 b = 0.5 * (c + c.transpose()) - cos_t * Mat3::Identity();
  Eigen::Index k = 0;
  b.diagonal().maxCoeff(&k);
  Vec3 axis = b.col(k) / std::sqrt(b(k, k) * (1.0 - cos_t));
  axis.normalize();
  if (axis.dot(w) < 0.0) axis = -axis;
  return theta * axis;
}

/// @brief Nearest rotation in the Frobenius sense; never applied implicitly.
[[nodiscard]] inline Mat3 nearest_rotation(const Mat3& c) {
  Eigen::JacobiSVD<Mat3> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

/// Element of SE_2(3): attitude, velocity and position sharing one frame.
struct ExtendedPose {
  Mat3 rot = Mat3::Identity();
  Vec3 vel = Vec3::Zero();
  Vec3 pos = Vec3::Zero();

  [[nodiscard]] static ExtendedPose identity() { return {}; }

  [[nodiscard]] ExtendedPose inverse() const {
    const Mat3 rt = rot.transpose();
    return {rt, -rt * vel, -rt * pos};
  }

  [[nodiscard]] ExtendedPose operator*(const ExtendedPose& o) const {
    return {rot * o.rot, rot * o.vel + vel, rot * o.pos + pos};
  }

  [[nodiscard]] Mat5 matrix() const {
    Mat5 m = Mat5::Identity();
    m.block<3, 3>(0, 0) = rot;
    m.block<3, 1>(0, 3) = vel;
    m.block<3, 1>(0, 4) = pos;
    return m;
  }

  [[nodiscard]] static ExtendedPose from_matrix(const Mat5& m) {
    return {m.block<3, 3>(0, 0), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4)};
  }

  /// @brief Orthonormality and unit determinant of the rotation block.
  [[nodiscard]] bool is_valid(double tol = 1e-9) const {
    return (rot.transpose() * rot - Mat3::Identity()).norm() <= tol &&
           std::abs(rot.determinant() - 1.0) <= tol && vel.allFinite() && pos.allFinite();
  }
};

[[nodiscard]] inline Mat5 hat(const Tangent9& xi) {
  Mat5 m = Mat5::Zero();
  m.block<3, 3>(0, 0) = skew(xi.rot);
  m.block<3, 1>(0, 3) = xi.vel;
  m.block<3, 1>(0, 4) = xi.pos;
  return m;
}

/// @brief Inverse of hat(); rejects matrices outside the algebra.
[[nodiscard]] inline Tangent9 vee(const Mat5& m, double tol = 1e-12) {
  const Mat3 top = m.block<3, 3>(0, 0);
  if (m.block<2, 5>(3, 0).cwiseAbs().maxCoeff() > tol || (top + top.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw MalformedAlgebraError("matrix is not an element of se_2(3)");
  }
  return {unskew(top), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4)};
}

[[nodiscard]] inline ExtendedPose exp_se23(const Tangent9& xi) {
  const Mat3 jac = gamma<1>(xi.rot);
  return {gamma<0>(xi.rot), jac * xi.vel, jac * xi.pos};
}
[[nodiscard]] inline ExtendedPose exp_se23(const Vec9& xi) { return exp_se23(Tangent9::from_vector(xi)); }

[[nodiscard]] inline Tangent9 log_se23(const ExtendedPose& t) {
  const Vec3 phi = so3_log(t.rot);
  const Mat3 jac_inv = gamma<1>(phi).inverse();
  return {phi, jac_inv * t.vel, jac_inv * t.pos};
}
[[nodiscard]] inline Vec9 log_se23_vector(const ExtendedPose& t) { return log_se23(t).vector(); }

/// @brief Ad_T with the (rot, vel, pos) ordering.
[[nodiscard]] inline Mat9 adjoint(const ExtendedPose& t) {
  Mat9 ad = Mat9::Zero();
  ad.block<3, 3>(0, 0) = t.rot;
  ad.block<3, 3>(3, 3) = t.rot;
  ad.block<3, 3>(6, 6) = t.rot;
  ad.block<3, 3>(3, 0) = skew(t.vel) * t.rot;
  ad.block<3, 3>(6, 0) = skew(t.pos) * t.rot;
  return ad;
}

/// @brief Algebra adjoint ad_xi.
[[nodiscard]] inline Mat9 algebra_adjoint(const Tangent9& xi) {
  Mat9 ad = Mat9::Zero();
  const Mat3 k = skew(xi.rot);
  ad.block<3, 3>(0, 0) = k;
  ad.block<3, 3>(3, 3) = k;
  ad.block<3, 3>(6, 6) = k;
  ad.block<3, 3>(3, 0) = skew(xi.vel);
  ad.block<3, 3>(6, 0) = skew(xi.pos);
  return ad;
}

/// @brief Left Jacobian of exp_se23, summed as sum_n ad^n / (n+1)!.
[[nodiscard]] inline Mat9 left_jacobian_se23(const Tangent9& xi) {
  const Mat9 ad = algebra_adjoint(xi);
  Mat9 term = Mat9::Identity();
  Mat9 sum = Mat9::Identity();
  for (int n = 1; n < 60; ++n) {
    term = term * ad / static_cast<double>(n + 1);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return sum;
}

[[nodiscard]] inline Mat9 right_jacobian_se23(const Tangent9& xi) {
  return left_jacobian_se23(Tangent9{-xi.rot, -xi.vel, -xi.pos});
}
[[nodiscard]] inline Mat9 left_jacobian_inverse_se23(const Tangent9& xi) {
  return left_jacobian_se23(xi).partialPivLu().inverse();
}
[[nodiscard]] inline Mat9 right_jacobian_inverse_se23(const Tangent9& xi) {
  return right_jacobian_se23(xi).partialPivLu().inverse();
}

/// @brief Time automorphism Phi_dt: position advances by dt times velocity.
[[nodiscard]] inline ExtendedPose phi_auto(double dt, const ExtendedPose& t) {
  return {t.rot, t.vel, t.pos + dt * t.vel};
}

/// Linear map induced by Phi_dt on the algebra, Phi_dt(exp(xi)) = exp(F xi).
struct AutomorphismF {
  double dt = 0.0;

  [[nodiscard]] Mat9 matrix() const {
    Mat9 f = Mat9::Identity();
    f.block<3, 3>(6, 3) = dt * Mat3::Identity();
    return f;
  }
  [[nodiscard]] AutomorphismF then(const AutomorphismF& later) const { return {dt + later.dt}; }
};

/// Which argument of Gamma_m(a + b) is treated as the small perturbation.
enum class SmallArgument { kFirst, kSecond };

/// @brief First-order split of Gamma_m(phi + psi). Exact to first order in
/// the small argument for m = 0; an approximation for higher orders.
[[nodiscard]] inline Mat3 bch_gamma(int m, const Vec3& phi, const Vec3& psi, SmallArgument small) {
  detail::check_gamma_order(m);
  if (m == 3) throw std::out_of_range("bch_gamma needs Gamma_{m+1}; m must be below 3");
  if (small == SmallArgument::kFirst) return so3_exp(gamma(m + 1, psi) * phi) * gamma(m, psi);
  return gamma(m, phi) * so3_exp(gamma(m + 1, -phi) * psi);
}

}  // namespace se23nav
