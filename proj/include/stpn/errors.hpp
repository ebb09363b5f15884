#pragma once

#include <stdexcept>
#include <string>

namespace stpn {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration (config files, scenario files, unknown keys).
struct ConfigError : Error {
  using Error::Error;
};

/// Violated operation precondition or malformed input data.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace stpn
