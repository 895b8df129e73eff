#pragma once

#include <stdexcept>
#include <string>

namespace irl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or index mismatch between arguments.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A computation produced NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (dt <= 0, gamma outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unknown configuration. The CLI maps this to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation attempted in an invalid state (empty buffer, stepping a finished episode).
class StateError : public Error {
 public:
  using Error::Error;
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace irl
