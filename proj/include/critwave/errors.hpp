#pragma once

#include <stdexcept>
#include <string>

namespace critwave {

// Error taxonomy. The CLI maps these onto process exit codes, so the
// hierarchy is part of the tool's contract:
//   ConfigError (and derived)  -> 2
//   GeometryError              -> 3
//   InstabilityError           -> 4
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, unknown keys, invalid parameter ranges.
struct ConfigError : Error {
  using Error::Error;
};

// Syntax error in an expression string or a structured file.
struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};

// Query outside a tabulated or invertible range (e.g. G^{-1} past the table).
struct DomainError : ConfigError {
  using ConfigError::ConfigError;
};

// A target geometry violates one of the structural assumptions.
struct GeometryError : Error {
  using Error::Error;
};

// Numerical blowup of the integrator (NaN, overflow, runaway values).
struct InstabilityError : Error {
  using Error::Error;
};

}  // namespace critwave
