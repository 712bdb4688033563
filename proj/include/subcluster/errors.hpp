#pragma once

#include <stdexcept>
#include <string>

namespace subcluster {

// Caller broke a documented precondition (bad vertex id, bad index, ...).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input file or byte stream.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inconsistent or unsatisfiable configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Loss of precision, overflow, or a failed numerical cross-check.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A constructed polynomial violates its approximation bounds (strict mode only).
struct PolynomialValidationError : NumericError {
  using NumericError::NumericError;
};

// Resource budget exceeded (walk table memory, dense size cap).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreprocessingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An artifact was queried against a graph it was not built from.
struct WrongGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace subcluster
