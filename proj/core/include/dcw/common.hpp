#pragma once

#include <stdexcept>
#include <string>

namespace dcw {

/// Bad user-supplied configuration (flags, config files, fixture names).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV rows, JSON documents).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to converge or left its validity envelope.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dcw
