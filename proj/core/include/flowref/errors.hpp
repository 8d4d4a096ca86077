#pragma once

#include <stdexcept>
#include <string>

namespace flowref {

/// Explicit time step exceeds the stability bound of an explicit scheme.
struct StabilityError : std::runtime_error {
  explicit StabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative solver hit its iteration cap without meeting its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be read/written or has an invalid format.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two algebraically equivalent evaluations disagree beyond tolerance,
/// signalling an internal quadrature inconsistency.
struct IdentityError : std::runtime_error {
  explicit IdentityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace flowref
