#pragma once

#include <stdexcept>
#include <string>

namespace raman {

// Error categories map to CLI exit codes: config -> 2, numeric -> 3, io -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed, truncated or version-mismatched binary artifact (dataset, model).
struct FormatError : IoError {
  using IoError::IoError;
};

}  // namespace raman
