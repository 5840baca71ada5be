#pragma once

#include <stdexcept>
#include <string>

namespace expdec {

/// Caller handed us something invalid (bad ids, empty cut, malformed file...).
struct InputError : std::invalid_argument {
  explicit InputError(const std::string &what) : std::invalid_argument(what) {}
};

/// The active set is too small for the source/target selection to be
/// well defined. The game treats this as immediate termination.
struct InstanceTooSmall : InputError {
  explicit InstanceTooSmall(const std::string &what) : InputError(what) {}
};

/// An invariant that must hold by construction was violated. Always a bug
/// (or a violated precondition the caller promised), never user input.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string &what) : std::logic_error(what) {}
};

/// A stated post-condition of an operation failed at runtime.
struct ContractViolation : InternalError {
  explicit ContractViolation(const std::string &what) : InternalError(what) {}
};

inline void require_input(bool cond, const std::string &what) {
  if (!cond) throw InputError(what);
}

inline void require_internal(bool cond, const std::string &what) {
  if (!cond) throw InternalError(what);
}

} // namespace expdec
