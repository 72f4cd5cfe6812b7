#pragma once

#include <stdexcept>
#include <string>

namespace coach {

// Caller supplied something malformed: unknown type name, empty sentence,
// bad derivation, mismatched profiles.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated by the caller.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An internal invariant does not hold. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coach
