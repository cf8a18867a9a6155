#pragma once

#include <stdexcept>
#include <string>

namespace nlsim {

/// Shape/grid mismatches and other violations of a data-structure contract.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arguments outside the mathematical domain of an operation (p <= 2, r < 1, t < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The inhomogeneity fails the admissibility hypotheses for the requested p.
class InadmissibleModel : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Raised when time stepping produces non-finite samples.
class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The final-state correction loop did not reach its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace nlsim
