#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, mismatched dimensions, out-of-range positions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A problem is too large for an exact (oracle) computation.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An input object violates its own invariants (e.g. a non-Hermitian rho).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside of its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qwalk
