#pragma once

#include <stdexcept>
#include <string>

namespace qspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument value failed (zero inverse, |p| >= 1 for phi, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input text could not be turned into a well-formed object.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a normal operator received one that is not.
class NotNormalError : public Error {
 public:
  using Error::Error;
};

/// The eigensolver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A matrix that had to be inverted is numerically singular.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// A slice function violates the even/odd symmetry of its components.
class InvalidFunctionError : public Error {
 public:
  using Error::Error;
};

/// Internal data (atoms, basis, projections) does not fit together.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qspec
