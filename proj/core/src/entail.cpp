#include "normguard/entail.hpp"

namespace normguard {

std::string to_string(Trilean t) {
  switch (t) {
    case Trilean::False: return "false";
    case Trilean::True: return "true";
    case Trilean::Indeterminate: return "indeterminate";
  }
  return "?";
}

bool definite(Trilean t, const std::string& what) {
  if (t == Trilean::Indeterminate)
    throw IndeterminateError("depth budget exhausted while deciding " + what);
  return t == Trilean::True;
}

FrozenConjunction freeze(const Conjunction& c) {
  FrozenConjunction out;
  std::uint64_t next = 0;
  for (const Literal& l : c.literals) {
    Literal g;
    g.predicate = l.predicate;
    for (const Term& t : l.args) {
      if (t.is_constant()) {
        g.args.push_back(t);
        continue;
      }
      auto it = out.mapping.find(t.name());
      if (it == out.mapping.end()) {
        Term frozen = Term::constant("$frz" + std::to_string(next++));
        it = out.mapping.emplace(t.name(), frozen).first;
      }
      g.args.push_back(it->second);
    }
    out.ground.literals.push_back(std::move(g));
  }
  out.ground = out.ground.normalized();
  return out;
}

Trilean entails(const KnowledgeBase& kb, const std::string& mt, const Conjunction& c1,
                const Conjunction& c2, const EntailOptions& options) {
  if (c2.is_top()) return Trilean::True;

  FrozenConjunction frozen = freeze(c1);

  std::vector<Goal> goals;
  goals.reserve(c2.literals.size());
  for (const Literal& l : c2.literals) goals.push_back(Goal::positive(l));

  SolveOptions so;
  so.depth_limit = options.depth_limit;
  so.max_solutions = 1;
  so.scratch = &frozen.ground.literals;

  SolveResult r = kb.solve(goals, mt, so);
  if (r.succeeded()) return Trilean::True;
  if (r.depth_exceeded) return Trilean::Indeterminate;
  return Trilean::False;
}

Trilean equivalent(const KnowledgeBase& kb, const std::string& mt, const Conjunction& c1,
                   const Conjunction& c2, const EntailOptions& options) {
  return trilean_and(entails(kb, mt, c1, c2, options), entails(kb, mt, c2, c1, options));
}

Trilean intersect_witness(const KnowledgeBase& kb, const std::string& mt,
                          const Conjunction& c1, const Conjunction& c2,
                          const Conjunction& c3, const EntailOptions& options) {
  return trilean_and(entails(kb, mt, c3, c1, options), entails(kb, mt, c3, c2, options));
}

}  // namespace normguard
