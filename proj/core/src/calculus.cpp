#include "normguard/calculus.hpp"

namespace normguard {

std::string to_string(ClosureAssumption c) {
  return c == ClosureAssumption::Prohibitive ? "prohibitive" : "permissive";
}

std::optional<ClosureAssumption> closure_from_string(const std::string& s) {
  if (s == "prohibitive") return ClosureAssumption::Prohibitive;
  if (s == "permissive") return ClosureAssumption::Permissive;
  return std::nullopt;
}

std::string to_string(Verdict v) {
  return v == Verdict::Permissible ? "permissible" : "impermissible";
}

std::string render_trace(const Judgment& j) {
  std::string out;
  for (const std::string& line : j.trace) out += line + "\n";
  return out;
}

namespace {

std::string frame_tag(const NormFrame& f) {
  return f.id + " (" + to_string(f.evaluation) + ", t=" + std::to_string(f.timestamp) + ")";
}

void log(std::vector<std::string>* trace, std::string line) {
  if (trace) trace->push_back(std::move(line));
}

void note_check(std::vector<DefeatCheck>* checks, const NormFrame& candidate,
                const char* exception, bool fired) {
  if (checks) checks->push_back({candidate.id, exception, fired});
}

bool must(Trilean t, const std::string& what) { return definite(t, what); }

}  // namespace

// ── defeat checks ────────────────────────────────────────────────────────

std::optional<Defeater> permission_defeated(
    const KnowledgeBase& kb, const NormStore& store, const std::string& mt,
    const NormFrame& permission, const Conjunction& b, const Conjunction& c,
    const EntailOptions& options, std::vector<DefeatCheck>* checks,
    std::vector<std::string>* trace) {
  for (const NormFrame& q : store.frames()) {
    if (q.norm_class() != NormClass::Prohibition) continue;

    // Exception 1.1: a later prohibition, active in c, whose grounds subsume
    // the permission's entire grounds.
    if (norm_prior_to_norm(permission, q)) {
      bool active = must(active_in(kb, mt, q, c, options),
                         "exception 1.1 activation of " + q.id);
      bool covers = active &&
                    must(entails(kb, mt, permission.behavior, q.behavior, options),
                         "exception 1.1 subsumption by " + q.id);
      bool fired = active && covers;
      note_check(checks, q, "1.1", fired);
      log(trace, "  exception 1.1 vs " + frame_tag(q) + ": later=yes active=" +
                     (active ? "yes" : "no") +
                     (active ? std::string(" subsumes-permission=") + (covers ? "yes" : "no")
                             : std::string()) +
                     (fired ? " -> fired" : " -> not fired"));
      if (fired) return Defeater{q.id, "1.1"};
    }

    // Exception 1.2: a prohibition covering the queried behavior itself,
    // provided its grounds do not subsume the permission's (that narrower
    // defeat is 1.1's business and stays subject to testimony order).
    {
      bool active = must(active_in(kb, mt, q, c, options),
                         "exception 1.2 activation of " + q.id);
      bool on_grounds = active &&
                        must(on_application_grounds(kb, mt, b, q, options),
                             "exception 1.2 grounds of " + q.id);
      bool perm_inside = false;
      if (active && on_grounds)
        perm_inside = must(entails(kb, mt, permission.behavior, q.behavior, options),
                           "exception 1.2 subsumption check of " + q.id);
      bool fired = active && on_grounds && !perm_inside;
      note_check(checks, q, "1.2", fired);
      log(trace, "  exception 1.2 vs " + frame_tag(q) + ": active=" +
                     (active ? "yes" : "no") +
                     (active ? std::string(" behavior-on-grounds=") + (on_grounds ? "yes" : "no")
                             : std::string()) +
                     (on_grounds ? std::string(" permission-subsumed=") + (perm_inside ? "yes" : "no")
                                 : std::string()) +
                     (fired ? " -> fired" : " -> not fired"));
      if (fired) return Defeater{q.id, "1.2"};
    }
  }
  return std::nullopt;
}

std::optional<Defeater> prohibition_defeated(
    const KnowledgeBase& kb, const NormStore& store, const std::string& mt,
    const NormFrame& prohibition, const Conjunction& /*b*/, const Conjunction& c,
    const EntailOptions& options, std::vector<DefeatCheck>* checks,
    std::vector<std::string>* trace) {
  for (const NormFrame& p : store.frames()) {
    if (p.norm_class() != NormClass::Permission) continue;

    // Exception 2.1: a later permission, active in c, whose grounds the
    // prohibition subsumes (carving a hole out of the prohibition).
    if (!norm_prior_to_norm(prohibition, p)) continue;
    bool active = must(active_in(kb, mt, p, c, options),
                       "exception 2.1 activation of " + p.id);
    bool inside = active &&
                  must(entails(kb, mt, p.behavior, prohibition.behavior, options),
                       "exception 2.1 subsumption by " + prohibition.id);
    bool fired = active && inside;
    note_check(checks, p, "2.1", fired);
    log(trace, "  exception 2.1 vs " + frame_tag(p) + ": later=yes active=" +
                   (active ? "yes" : "no") +
                   (active ? std::string(" permission-inside-prohibition=") + (inside ? "yes" : "no")
                           : std::string()) +
                   (fired ? " -> fired" : " -> not fired"));
    if (fired) return Defeater{p.id, "2.1"};
  }
  return std::nullopt;
}

// ── single-grounding judgment ────────────────────────────────────────────

namespace {

/// Inference rule 1: permissible under Prohibitive closure iff some active,
/// applicable permission survives every defeat check.
Judgment judge_prohibitive(const KnowledgeBase& kb, const NormStore& store,
                           const std::string& mt, const Conjunction& b,
                           const Conjunction& c, const EntailOptions& options) {
  Judgment j;
  j.trace.push_back("rule 1 (prohibitive closure): query behavior " + to_string(b) +
                    " in context " + to_string(c));
  for (const NormFrame& p : store.frames()) {
    if (p.norm_class() != NormClass::Permission) continue;
    bool active = must(active_in(kb, mt, p, c, options), "activation of " + p.id);
    if (!active) {
      j.trace.push_back("rule 1: permission " + frame_tag(p) + ": active=no");
      continue;
    }
    bool applies = must(on_application_grounds(kb, mt, b, p, options),
                        "applicability of " + p.id);
    if (!applies) {
      j.trace.push_back("rule 1: permission " + frame_tag(p) + ": active=yes applicable=no");
      continue;
    }
    j.trace.push_back("rule 1: permission " + frame_tag(p) + ": active=yes applicable=yes");
    std::vector<DefeatCheck> checks;
    auto defeater =
        permission_defeated(kb, store, mt, p, b, c, options, &checks, &j.trace);
    if (!defeater) {
      j.trace.push_back("rule 1: permission " + p.id + " undefeated -> permissible");
      j.verdict = Verdict::Permissible;
      j.basis = RuleBasis{p.id, std::move(checks)};
      return j;
    }
    j.trace.push_back("rule 1: permission " + p.id + " defeated by " + defeater->norm_id +
                      " via exception " + defeater->exception);
  }
  j.trace.push_back("closure: no undefeated permission -> impermissible");
  j.verdict = Verdict::Impermissible;
  j.basis.reset();
  return j;
}

/// Inference rule 2: impermissible under Permissive closure iff some active,
/// applicable prohibition survives exception 2.1.
Judgment judge_permissive(const KnowledgeBase& kb, const NormStore& store,
                          const std::string& mt, const Conjunction& b,
                          const Conjunction& c, const EntailOptions& options) {
  Judgment j;
  j.trace.push_back("rule 2 (permissive closure): query behavior " + to_string(b) +
                    " in context " + to_string(c));
  for (const NormFrame& q : store.frames()) {
    if (q.norm_class() != NormClass::Prohibition) continue;
    bool active = must(active_in(kb, mt, q, c, options), "activation of " + q.id);
    if (!active) {
      j.trace.push_back("rule 2: prohibition " + frame_tag(q) + ": active=no");
      continue;
    }
    bool applies = must(on_application_grounds(kb, mt, b, q, options),
                        "applicability of " + q.id);
    if (!applies) {
      j.trace.push_back("rule 2: prohibition " + frame_tag(q) +
                        ": active=yes applicable=no");
      continue;
    }
    j.trace.push_back("rule 2: prohibition " + frame_tag(q) + ": active=yes applicable=yes");
    std::vector<DefeatCheck> checks;
    auto defeater =
        prohibition_defeated(kb, store, mt, q, b, c, options, &checks, &j.trace);
    if (!defeater) {
      j.trace.push_back("rule 2: prohibition " + q.id + " undefeated -> impermissible");
      j.verdict = Verdict::Impermissible;
      j.basis = RuleBasis{q.id, std::move(checks)};
      return j;
    }
    j.trace.push_back("rule 2: prohibition " + q.id + " defeated by " + defeater->norm_id +
                      " via exception " + defeater->exception);
  }
  j.trace.push_back("closure: no undefeated prohibition -> permissible");
  j.verdict = Verdict::Permissible;
  j.basis.reset();
  return j;
}

Judgment judge_one(const KnowledgeBase& kb, const NormStore& store, const std::string& mt,
                   const Conjunction& b, const Conjunction& c, ClosureAssumption closure,
                   const EntailOptions& options) {
  return closure == ClosureAssumption::Prohibitive
             ? judge_prohibitive(kb, store, mt, b, c, options)
             : judge_permissive(kb, store, mt, b, c, options);
}

/// Assignments over the declared candidate variables, in declaration order.
/// An empty declaration yields the single empty assignment.
bool next_assignment(const std::vector<std::pair<std::string, std::vector<Term>>>& cands,
                     std::vector<std::size_t>& idx) {
  for (std::size_t i = cands.size(); i-- > 0;) {
    if (++idx[i] < cands[i].second.size()) return true;
    idx[i] = 0;
  }
  return false;
}

Substitution assignment_substitution(
    const std::vector<std::pair<std::string, std::vector<Term>>>& cands,
    const std::vector<std::size_t>& idx) {
  Substitution s;
  for (std::size_t i = 0; i < cands.size(); ++i)
    s.bind(cands[i].first, cands[i].second[idx[i]]);
  return s;
}

/// Scans candidate groundings of b, hunting for one that is permissible.
/// The first permissible grounding ends the scan and is reported with its
/// witness; if none exists, the behavior is impermissible for every candidate
/// grounding and the first judgment stands in for them.  Both query entry
/// points share this scan so their verdicts stay exact complements.
Judgment scan_groundings(const KnowledgeBase& kb, const NormStore& store,
                         const std::string& mt, const Conjunction& b,
                         const Conjunction& c, ClosureAssumption closure,
                         const CalculusOptions& options) {
  EntailOptions eo{options.depth_limit};
  if (options.candidates.empty()) return judge_one(kb, store, mt, b, c, closure, eo);

  for (const auto& [var, terms] : options.candidates)
    if (terms.empty()) {
      Judgment j;
      j.verdict = Verdict::Impermissible;
      j.trace.push_back("no candidate terms for " + var + " -> vacuous scan");
      return j;
    }

  std::vector<std::size_t> idx(options.candidates.size(), 0);
  Judgment last;
  bool first = true;
  do {
    Substitution s = assignment_substitution(options.candidates, idx);
    Judgment j = judge_one(kb, store, mt, s.apply(b), c, closure, eo);
    j.witness = s;
    if (j.verdict == Verdict::Permissible) return j;
    if (first) {
      last = std::move(j);
      first = false;
    }
  } while (next_assignment(options.candidates, idx));
  last.witness = Substitution{};
  last.trace.push_back("no candidate grounding is permissible");
  return last;
}

}  // namespace

Judgment permissible(const KnowledgeBase& kb, const NormStore& store,
                     const std::string& mt, const Conjunction& b, const Conjunction& c,
                     ClosureAssumption closure, const CalculusOptions& options) {
  return scan_groundings(kb, store, mt, b, c, closure, options);
}

Judgment impermissible(const KnowledgeBase& kb, const NormStore& store,
                       const std::string& mt, const Conjunction& b, const Conjunction& c,
                       ClosureAssumption closure, const CalculusOptions& options) {
  return scan_groundings(kb, store, mt, b, c, closure, options);
}

}  // namespace normguard
