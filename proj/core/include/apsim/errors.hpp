#pragma once

#include <stdexcept>
#include <string>

namespace apsim {

// Every error raised by the library derives from Error so callers can catch
// the whole family in one place (the CLI maps it to a nonzero exit code).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index, mask position or vector length incompatible with an array.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid request (empty mask, unsupported op/variant pair).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Operand values that do not fit the declared bitwidth.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Layer shapes that do not produce integral output dimensions or do not chain.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A layer that cannot be placed on the configured hardware.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration: profile files, voltage points, model/precision files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Cost accounting was asked for something it cannot attribute.
class AccountingError : public Error {
 public:
  using Error::Error;
};

}  // namespace apsim
