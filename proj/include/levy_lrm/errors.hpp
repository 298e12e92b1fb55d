#pragma once

#include <stdexcept>
#include <string>

namespace levy_lrm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model parameter violates a basic positivity/finiteness requirement.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (tau below the floor,
/// log-strike outside the FFT grid, nonpositive kappa, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Model fails the integrability / drift conditions required for the
/// minimal martingale measure to exist.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Real part of a characteristic exponent exceeds the overflow guard.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A complex power/log base left the open right half-plane.
class BranchCutError : public Error {
 public:
  using Error::Error;
};

/// Transform length is not a power of two.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// N * eta does not reach the truncation point certified for the requested
/// allowable error.
class TailConditionError : public Error {
 public:
  using Error::Error;
};

/// Operation requested for a model that does not support it (I1 under VG).
class ModelMismatch : public Error {
 public:
  using Error::Error;
};

/// Reference quadrature did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace levy_lrm
