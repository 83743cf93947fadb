#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bkj {

/// Precondition violated by a caller-supplied argument.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Statistic undefined for the input (e.g. zero variance).
struct DegenerateInputError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Malformed file contents. `line` is 1-based, 0 when not line-specific.
struct FormatError : std::runtime_error {
  FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line(line) {}
  std::size_t line;
};

/// Recognizable file whose magic or version this build does not read.
struct UnsupportedFormatError : FormatError {
  using FormatError::FormatError;
};

/// Training diverged or produced non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bkj
