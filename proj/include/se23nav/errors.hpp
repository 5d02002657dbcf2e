// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <stdexcept>
#include <string>

namespace se23nav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A 5x5 matrix that is not an element of the Lie algebra.
class MalformedAlgebraError : public Error {
 public:
  using Error::Error;
};

/// Rotation angle too close to pi for a unique logarithm.
class BranchSingularityError : public Error {
 public:
  using Error::Error;
};

/// Transport rate undefined near the geographic poles.
class PolarSingularityError : public Error {
 public:
  using Error::Error;
};

/// Operands belong to different frame variants or perturbation sides.
class VariantMismatchError : public Error {
 public:
  using Error::Error;
};

/// Covariance or noise matrix is not positive semidefinite.
class NonPsdError : public Error {
 public:
  using Error::Error;
};

/// Any other violated input contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace se23nav
