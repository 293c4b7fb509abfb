#pragma once

#include <stdexcept>
#include <string>

namespace homsim {

/// Invalid specs, mismatched grids, malformed configuration. Maps to CLI exit 2.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numeric guard trips at run time: out-of-window lookups, non-finite samples,
/// degenerate (zero-baseline) configurations. Maps to CLI exit 3.
class NumericGuardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Requested computation exceeds a hard size cap. Maps to CLI exit 3.
class ResourceLimitError : public NumericGuardError {
public:
  using NumericGuardError::NumericGuardError;
};

}  // namespace homsim
