#pragma once

#include <stdexcept>
#include <string>

namespace nsrr {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: invariant violations, bad documents, arity mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical guarantee failed (e.g. a composed chain does not close).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsrr
