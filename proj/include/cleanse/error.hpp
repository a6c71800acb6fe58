#pragma once

#include <stdexcept>
#include <string>

namespace cleanse {

/// Runtime failure raised by library routines (bad dimensions, exhausted
/// search space, I/O problems).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration. The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cleanse
