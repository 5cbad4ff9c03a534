#pragma once

#include <stdexcept>
#include <string>

namespace coldcc {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration; message carries the source location when known.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular propagation step, missing bound states, ...
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace coldcc
