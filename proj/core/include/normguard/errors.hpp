#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace normguard {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. `position` is a byte offset into the source text.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position = 0;
};

/// A sentence refers to a topic symbol that the taxonomy does not define.
struct VocabularyError : Error {
  using Error::Error;
};

/// A predicate was used with a different argument count than first seen.
struct ArityError : Error {
  using Error::Error;
};

struct UnknownMicrotheoryError : Error {
  using Error::Error;
};

/// Adding the requested inheritance link would make the microtheory graph cyclic.
struct CycleError : Error {
  using Error::Error;
};

/// Catch-all for knowledge-base mutations that violate a store invariant
/// (non-ground fact, reserved symbol, duplicate norm id, ...).
struct StoreError : Error {
  using Error::Error;
};

/// A proof ran out of depth budget where a definite answer was required.
/// Deliberately loud: callers must not treat an unfinished search as "false".
struct IndeterminateError : Error {
  using Error::Error;
};

/// Planner misuse or a broken planner invariant (e.g. an action step that is
/// still unground after a successful precondition proof).
struct PlanError : Error {
  using Error::Error;
};

}  // namespace normguard
