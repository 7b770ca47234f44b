#pragma once

#include <stdexcept>
#include <string>

namespace c2b {

// Base class for all library errors. The CLI maps subclasses to exit codes:
// usage/config -> 1, data/dimension/io -> 2, numerical failure -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape, divisibility, or size constraint violated.
struct DimensionError : Error {
  using Error::Error;
};

// Value-level constraint violated (non-finite, out of range, not binary).
struct ValueError : Error {
  using Error::Error;
};

// Exposure code unusable for the requested operation.
struct DegenerateCodeError : Error {
  using Error::Error;
};

// Tile system not invertible (or inverse residual too large).
struct SingularSystemError : Error {
  using Error::Error;
};

// File system or file format failure.
struct IoError : Error {
  using Error::Error;
};

// Configuration file problem (missing key, parse failure).
struct ConfigError : Error {
  using Error::Error;
};

// Bad invocation: incompatible flags, wrong checkpoint variant, etc.
struct UsageError : Error {
  using Error::Error;
};

// Non-finite loss or other numerical breakdown.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace c2b
