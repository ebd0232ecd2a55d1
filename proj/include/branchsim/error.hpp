// include/branchsim/error.hpp
//
// Exception types thrown by the simulator. Everything derives from
// branchsim::Error so callers can catch the family in one place; the CLI maps
// CapacityError to its own exit code.

#pragma once

#include <stdexcept>
#include <string>

namespace branchsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed register list, unknown register name, missing required register.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// A composite space or a dense intermediate exceeds its configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different layouts or dimensions.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// A basis label or level is outside its register.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Normalizing a vector whose norm is numerically zero.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// Argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A no-signaling perturbation that touches the protected branch.
class InvalidPerturbation : public Error {
 public:
  using Error::Error;
};

}  // namespace branchsim
