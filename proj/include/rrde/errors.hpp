#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rrde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (ordering, off-grid time, point
/// outside the closure, dimension mismatch).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exponents outside the admissible regime (e.g. 1/p + 1/q <= 1).
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Non-convex or uncertified domain passed to a solver that needs convexity.
class UnsupportedDomainError : public Error {
 public:
  using Error::Error;
};

/// Partition condition cannot be met at single grid-step resolution.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double step_omega, double epsilon)
      : Error(what), step_omega_(step_omega), epsilon_(epsilon) {}
  double step_omega() const { return step_omega_; }
  double epsilon() const { return epsilon_; }

 private:
  double step_omega_;
  double epsilon_;
};

/// Refinement ladder exhausted before consecutive iterates agreed.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> gaps)
      : Error(what), gaps_(std::move(gaps)) {}
  const std::vector<double>& gaps() const { return gaps_; }

 private:
  std::vector<double> gaps_;
};

/// Fixed-point iteration of an implicit Skorohod step ran out of budget.
class ContractionFailure : public Error {
 public:
  ContractionFailure(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Step violates the contraction threshold and cannot be split further.
class StepTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Requested resources exceed a guard (e.g. dyadic level too deep).
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace rrde
