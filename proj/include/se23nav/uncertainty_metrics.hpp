// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "se23nav/propagation.hpp"

namespace se23nav {

enum class CriterionKind { kDOptimality, kAOptimality, kEOptimality, kRenyiEntropy };

/// Scalar uncertainty criterion; alpha is used by the Renyi entropy only.
struct UncertaintyCriterion {
  CriterionKind kind = CriterionKind::kDOptimality;
  double alpha = 2.0;

  [[nodiscard]] static UncertaintyCriterion d_opt() { return {CriterionKind::kDOptimality, 0.0}; }
  [[nodiscard]] static UncertaintyCriterion a_opt() { return {CriterionKind::kAOptimality, 0.0}; }
  [[nodiscard]] static UncertaintyCriterion e_opt() { return {CriterionKind::kEOptimality, 0.0}; }
  [[nodiscard]] static UncertaintyCriterion renyi(double alpha) {
    if (!(alpha >= 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
      throw PreconditionError("Renyi order must lie in [0, 1) or (1, inf)");
    }
    return {CriterionKind::kRenyiEntropy, alpha};
  }
};

/// @brief log det of a PSD matrix from the spectrum of its unit-diagonal
/// rescaling; -inf when numerically singular.
template <int N>
[[nodiscard]] double log_det_psd(const Eigen::Matrix<double, N, N>& sigma) {
  using Matrix = Eigen::Matrix<double, N, N>;
  // Mixed units (rad, m/s, earth-centred m) make the raw matrix badly scaled.
  double offset = 0.0;
  Matrix scaled = sigma;
  if (sigma.diagonal().minCoeff() > 0.0) {
    const Eigen::Matrix<double, N, 1> inv_sqrt = sigma.diagonal().cwiseSqrt().cwiseInverse();
    scaled = inv_sqrt.asDiagonal() * sigma * inv_sqrt.asDiagonal();
    offset = sigma.diagonal().array().log().sum();
  }
  const auto eig = Eigen::SelfAdjointEigenSolver<Matrix>(scaled, Eigen::EigenvaluesOnly).eigenvalues();
  const double scale = std::max(1e-300, eig.cwiseAbs().maxCoeff());
  if (eig.minCoeff() < -1e-9 * scale) throw NonPsdError("matrix is not positive semidefinite");
  if (eig.minCoeff() <= N * std::numeric_limits<double>::epsilon() * scale) {
    return -std::numeric_limits<double>::infinity();
  }
  return offset + eig.array().log().sum();
}

/// @brief Criterion value for a 9x9 covariance.
[[nodiscard]] inline double criterion_value(const UncertaintyCriterion& c, const Mat9& sigma) {
  constexpr double n = 9.0;
  switch (c.kind) {
    case CriterionKind::kDOptimality: {
      const double ld = log_det_psd<9>(sigma);
      return std::isinf(ld) ? 0.0 : std::exp(ld / n);
    }
    case CriterionKind::kAOptimality:
      return sigma.trace();
    case CriterionKind::kEOptimality:
      return Eigen::SelfAdjointEigenSolver<Mat9>(sigma, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    case CriterionKind::kRenyiEntropy: {
      const double a = c.alpha;
      if (a == 0.0) return std::numeric_limits<double>::infinity();
      const double ld = log_det_psd<9>(sigma);
      return 0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(a) / (a - 1.0)) + 0.5 * ld;
    }
  }
  throw PreconditionError("unknown criterion");
}

/// One step where log det decreased beyond the slack.
struct MonotonicityViolation {
  std::size_t index = 0;  // covariance index k, compared with k-1
  double log_det_before = 0.0;
  double log_det_after = 0.0;
};

struct MonotonicityReport {
  std::vector<double> log_dets;
  std::vector<MonotonicityViolation> violations;
  double slack = -1e-12;

  [[nodiscard]] bool monotone() const { return violations.empty(); }
  [[nodiscard]] std::optional<std::size_t> first_violation() const {
    if (violations.empty()) return std::nullopt;
    return violations.front().index;
  }
};

/// @brief Checks log det Sigma_{k} - log det Sigma_{k-1} >= slack along a chain.
[[nodiscard]] inline MonotonicityReport verify_monotonicity(std::span<const Mat9> chain, double slack = -1e-12) {
  MonotonicityReport rep;
  rep.slack = slack;
  rep.log_dets.reserve(chain.size());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    rep.log_dets.push_back(log_det_psd<9>(chain[k]));
    if (k == 0) continue;
    const double before = rep.log_dets[k - 1];
    const double after = rep.log_dets[k];
    if (std::isinf(before) && before < 0.0) continue;
    if (after - before < slack) rep.violations.push_back({k, before, after});
  }
  return rep;
}

}  // namespace se23nav
