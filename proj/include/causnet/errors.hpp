#pragma once

#include <stdexcept>
#include <string>

namespace causnet {

// Base class for everything this library throws on purpose.
struct causnet_error : std::runtime_error {
  explicit causnet_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments: negative sizes, out-of-range tuning constants, mismatched shapes.
struct invalid_argument_error : causnet_error {
  explicit invalid_argument_error(const std::string& msg) : causnet_error(msg) {}
};

// A matrix that must be symmetric positive definite failed a factorization.
struct not_positive_definite_error : causnet_error {
  explicit not_positive_definite_error(const std::string& msg) : causnet_error(msg) {}
};

// A linear system or inverse could not be computed reliably.
struct near_singular_error : causnet_error {
  explicit near_singular_error(const std::string& msg) : causnet_error(msg) {}
};

// Simulated series left the configured magnitude bound (unstable process).
struct numeric_overflow_error : causnet_error {
  explicit numeric_overflow_error(const std::string& msg) : causnet_error(msg) {}
};

// A column with zero variance cannot be standardized.
struct zero_variance_error : causnet_error {
  explicit zero_variance_error(const std::string& msg) : causnet_error(msg) {}
};

// An iterative solver ran out of iterations; carries the residual it reached.
struct convergence_error : causnet_error {
  double residual;
  int iterations;
  convergence_error(const std::string& msg, double residual_, int iterations_)
      : causnet_error(msg), residual(residual_), iterations(iterations_) {}
};

// A quantity that is non-negative in exact arithmetic came out materially negative.
struct numerical_integrity_error : causnet_error {
  double value;
  numerical_integrity_error(const std::string& msg, double value_)
      : causnet_error(msg), value(value_) {}
};

// Configuration files / CLI arguments that do not describe a runnable experiment.
struct config_error : causnet_error {
  explicit config_error(const std::string& msg) : causnet_error(msg) {}
};

}  // namespace causnet
