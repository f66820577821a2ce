#pragma once

#include <stdexcept>
#include <string>

namespace mdlgbc {

/// Malformed or inconsistent input data (CSV content, model files, dimensions).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments to a library call or CLI command.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An internal invariant did not hold; indicates a bug, not bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mdlgbc
