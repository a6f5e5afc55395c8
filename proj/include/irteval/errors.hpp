#pragma once

#include <stdexcept>
#include <string>

namespace irteval {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data, parameters, or configuration. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content; the message carries the location. CLI exit code 1.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Failure while computing: degenerate metric inputs, divergent estimates,
/// oracle gaps mid-session. CLI exit code 2.
class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace irteval
