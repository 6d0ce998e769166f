#pragma once

#include <stdexcept>
#include <string>

namespace corrsim {

// Bad run configuration or inconsistent operands (dimension mismatch etc.).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at runtime: non-convergence, norm/trace drift past limits.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace corrsim
