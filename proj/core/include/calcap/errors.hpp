#pragma once

#include <stdexcept>
#include <string>

namespace calcap {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an input that violates an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed on valid input.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its refinement budget.
class QuadratureError : public ComputationError {
 public:
  QuadratureError(const std::string& what, double estimate, double error_estimate)
      : ComputationError(what + " (estimate " + std::to_string(estimate) + ", error estimate " +
                         std::to_string(error_estimate) + ")"),
        estimate_(estimate),
        error_estimate_(error_estimate) {}

  double estimate() const { return estimate_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

}  // namespace calcap
