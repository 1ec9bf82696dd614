#pragma once

#include <stdexcept>
#include <string>

namespace witsen {

// Bad parameters, out-of-range sizes, malformed input documents.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values or failed root searches inside a computation.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was violated by the caller.
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace witsen
