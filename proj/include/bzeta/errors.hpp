#pragma once

#include <stdexcept>
#include <string>

namespace bzeta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input could not be parsed or is structurally invalid.
class MalformedInput : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The configuration is geometrically unusable (overlap, eclipse, shadowing).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver ran out of budget; carries the best residual reached.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Generic numerical breakdown (stagnation, non-contraction, bracketing).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same quantity disagree.
class InternalConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Requested quantity needs orbit data that is not available.
class IncompleteData : public Error {
 public:
  using Error::Error;
};

/// Argument-principle count did not come out integral.
class TrustRegionViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bzeta
