#pragma once

#include <stdexcept>
#include <string>

namespace levyou {

/// Base of every error thrown by the toolkit. The CLI maps subclasses to
/// stable exit codes (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Inconsistent matrix/vector shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Malformed or invalid configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// A computation that is well-posed but refused because its output would be
/// meaningless (e.g. inverting a characteristic function with no density).
class RefusedError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Numerical accuracy target not reached within the work budget.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }
  int exit_code() const noexcept override { return 4; }

 private:
  double residual_;
};

/// Operation not available for the given input class.
class UnsupportedError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace levyou
