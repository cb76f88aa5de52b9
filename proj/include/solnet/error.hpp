#pragma once

#include <stdexcept>
#include <string>

namespace solnet {

/// Base of every exception thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input: parameters outside their domain, malformed grids.
struct ConfigError : Error {
  using Error::Error;
};

/// An argument lies outside the range where a closed form exists.
struct DomainError : Error {
  using Error::Error;
};

/// Solver failure: non-convergence, singular matrices, integrator breakdown.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace solnet
