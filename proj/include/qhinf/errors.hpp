#pragma once

#include <stdexcept>
#include <string>

namespace qhinf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix shapes do not conform, or a quadrature count is odd.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity that must be real (or exact) carried a residue above threshold.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The Hamiltonian matrix has eigenvalues on (or numerically at) the imaginary axis.
class NoStabilizingSolution : public Error {
 public:
  using Error::Error;
};

/// The stable invariant subspace has an ill-conditioned leading block.
class SubspaceSingular : public Error {
 public:
  using Error::Error;
};

/// One of the synthesis assumptions (D12'D12 > 0 or D21 D21' > 0) fails.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(int which, const std::string& what) : Error(what), which_(which) {}
  int which() const { return which_; }

 private:
  int which_;
};

/// I - YX is singular, i.e. the coupling condition rho(XY) < 1 is violated.
class SpectralRadiusViolation : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class UnstableSystem : public Error {
 public:
  using Error::Error;
};

/// Bisection could not bracket the norm; carries the frequency-grid estimate.
class NormBracketFailure : public Error {
 public:
  NormBracketFailure(const std::string& what, double grid_estimate)
      : Error(what), grid_estimate_(grid_estimate) {}
  double grid_estimate() const { return grid_estimate_; }

 private:
  double grid_estimate_;
};

}  // namespace qhinf
