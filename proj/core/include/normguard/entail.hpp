#pragma once

#include <map>

#include "normguard/kb.hpp"

namespace normguard {

/// Three-valued answer for proof-backed questions.  Indeterminate marks a
/// search cut by the depth budget; it must never decay to False silently.
enum class Trilean { False, True, Indeterminate };

std::string to_string(Trilean t);

inline Trilean trilean_and(Trilean a, Trilean b) {
  if (a == Trilean::False || b == Trilean::False) return Trilean::False;
  if (a == Trilean::Indeterminate || b == Trilean::Indeterminate)
    return Trilean::Indeterminate;
  return Trilean::True;
}

/// Converts to bool, refusing to guess on Indeterminate.
bool definite(Trilean t, const std::string& what);

struct FrozenConjunction {
  Conjunction ground;                       // variables replaced by fresh constants
  std::map<std::string, Term> mapping;      // variable name -> frozen constant
};

/// Replaces each free variable with a fresh reserved constant ($frz<n>).
/// Universal instantiation: proving from the frozen facts proves the open
/// conjunction for arbitrary values.
FrozenConjunction freeze(const Conjunction& c);

struct EntailOptions {
  int depth_limit = KnowledgeBase::kDefaultDepthLimit;
};

/// Does c1 entail c2 against the rules visible from `mt`?  Implements the
/// deduction-theorem reading: freeze c1, expose it as scratch facts, prove c2.
/// The store is left bit-identical; concurrent calls are safe.
Trilean entails(const KnowledgeBase& kb, const std::string& mt, const Conjunction& c1,
                const Conjunction& c2, const EntailOptions& options = {});

/// Mutual entailment.
Trilean equivalent(const KnowledgeBase& kb, const std::string& mt, const Conjunction& c1,
                   const Conjunction& c2, const EntailOptions& options = {});

/// Does the witness c3 land on both c1's and c2's grounds (c3 entails each)?
/// Used to certify that two behaviors overlap on a named, nontrivial case.
Trilean intersect_witness(const KnowledgeBase& kb, const std::string& mt,
                          const Conjunction& c1, const Conjunction& c2,
                          const Conjunction& c3, const EntailOptions& options = {});

}  // namespace normguard
