#pragma once

#include <stdexcept>
#include <string>

namespace cmrel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input (bad discriminant, point off the curve, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The working precision does not allow a decision. Callers may retry at a
/// higher precision; the library never guesses in this situation.
class Indeterminate : public Error {
 public:
  using Error::Error;
};

/// Precision too low for the requested search (integer relations, recognition).
class InsufficientPrecision : public Indeterminate {
 public:
  explicit InsufficientPrecision(const std::string& what = "insufficient precision")
      : Indeterminate(what) {}
};

/// Violated internal invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmrel
