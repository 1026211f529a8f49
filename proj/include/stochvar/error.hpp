#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stochvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (v <= 0, tau < 0, empty series, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model parameter set violates one of its structural constraints.
///
/// `constraint()` names the violated inequality, e.g. "p = 2*gamma*theta/kappaH^2 > 1".
class ConstraintViolation : public DomainError {
 public:
  ConstraintViolation(std::string constraint, const std::string& detail)
      : DomainError("constraint violated: " + constraint + " (" + detail + ")"),
        constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// A moment (or a quantity built from one) does not exist for the given parameters.
class DivergentMoment : public Error {
 public:
  using Error::Error;
};

/// Series too short or otherwise degenerate for an estimator.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Nonlinear/linear fit failed. Carries the residual sum-of-squares trace.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, std::vector<double> residual_trace = {})
      : Error(what), trace_(std::move(residual_trace)) {}

  const std::vector<double>& residual_trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Malformed input file; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace stochvar
