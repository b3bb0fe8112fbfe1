#pragma once

#include <stdexcept>
#include <string>

namespace qrg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad call arguments: dimension mismatches, unknown labels, invalid ranges.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Instance exceeds a configured size cap.
class TooLargeError : public Error {
public:
  using Error::Error;
};

/// A numerical routine failed to reach its accuracy target.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// An internal construction produced an object violating its own invariant.
/// Treated as fatal: it indicates a bug, not bad input.
class InvariantError : public Error {
public:
  using Error::Error;
};

}  // namespace qrg
