#pragma once

#include <stdexcept>
#include <string>

namespace jetlag {

/// Base class for all engine errors. Messages are prefixed with the
/// originating module ("expr: ...", "mech: ...") so callers can attribute
/// failures without catching per-module types.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression construction or normalization failure.
class ExprError : public Error {
 public:
  using Error::Error;
};

/// Numeric evaluation failure (unbound symbol, log of non-positive value,
/// division by zero from a negative power, non-finite intermediate).
class EvalError : public ExprError {
 public:
  using ExprError::ExprError;
};

/// Problem-file or s-expression syntax error with source location.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int col)
      : Error(what), line_(line), col_(col) {}
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

/// Runtime failure inside the mechanics integrators (singular Hessian,
/// non-finite state). Carries the time of failure.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace jetlag
