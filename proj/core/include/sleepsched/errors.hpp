#pragma once

#include <stdexcept>
#include <string>

namespace sleepsched {

/// Malformed or inconsistent configuration; `what()` names the key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sleepsched
