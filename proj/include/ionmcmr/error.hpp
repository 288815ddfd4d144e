#pragma once

#include <stdexcept>
#include <string>

namespace ionmcmr {

/// Failure category; the CLI maps each one onto a distinct exit code.
enum class ErrorCategory { Config, Numerical, Convergence };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed input: bad file, unknown reference, wrong unit.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

/// Singularities, contract violations on numerical inputs, loss of trace or positivity.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

/// Iterative procedures that did not settle (steady states, fits, tracking).
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorCategory::Convergence, what) {}
};

}  // namespace ionmcmr
