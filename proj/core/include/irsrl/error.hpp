#pragma once

#include <stdexcept>
#include <string>

namespace irsrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a value (not a shape) was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf showed up in a gradient, target or loss. Training treats this as divergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration. `key()` names the offending config key when there is one.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace irsrl
