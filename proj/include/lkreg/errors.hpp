#pragma once

#include <stdexcept>
#include <string>

namespace lkreg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed configuration, or mismatched geometry.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Non-finite iterates, solver breakdown, degenerate operators.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lkreg
