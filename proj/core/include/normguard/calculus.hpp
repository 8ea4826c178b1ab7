#pragma once

#include "normguard/norms.hpp"

namespace normguard {

/// Closure assumption for unregulated behavior: Prohibitive forbids whatever
/// no permission covers; Permissive allows whatever no prohibition covers.
enum class ClosureAssumption { Prohibitive, Permissive };

std::string to_string(ClosureAssumption c);
std::optional<ClosureAssumption> closure_from_string(const std::string& s);

enum class Verdict { Permissible, Impermissible };
std::string to_string(Verdict v);

struct Defeater {
  std::string norm_id;     // the frame whose exception fired
  std::string exception;   // "1.1", "1.2" or "2.1"
  bool operator==(const Defeater&) const = default;
};

struct DefeatCheck {
  std::string candidate;
  std::string exception;
  bool fired = false;
  bool operator==(const DefeatCheck&) const = default;
};

/// The norm that carried the verdict plus every defeat check examined on the
/// way.  Absent basis means the verdict fell out of the closure assumption.
struct RuleBasis {
  std::string norm_id;
  std::vector<DefeatCheck> checks;
};

struct Judgment {
  Verdict verdict = Verdict::Impermissible;
  std::optional<RuleBasis> basis;          // nullopt = by closure
  std::vector<std::string> trace;          // one line per rule/exception check
  Substitution witness;                    // bindings for existential variables

  bool by_closure() const { return !basis.has_value(); }
};

std::string render_trace(const Judgment& j);

struct CalculusOptions {
  int depth_limit = KnowledgeBase::kDefaultDepthLimit;
  /// Existential candidates for designated free variables of the queried
  /// behavior.  Listed variables range over their candidate terms and the
  /// first satisfying assignment is reported as the judgment's witness;
  /// unlisted free variables are frozen (read universally).
  std::vector<std::pair<std::string, std::vector<Term>>> candidates;
};

/// Is behavior b permissible for the store's agent in situation c?  Under
/// Prohibitive closure this holds exactly when some active, applicable
/// permission survives every defeat check; under Permissive closure it is the
/// complement of the impermissibility rule.  Throws IndeterminateError when a
/// required proof exhausts its depth budget; never defaults silently.
Judgment permissible(const KnowledgeBase& kb, const NormStore& store,
                     const std::string& mt, const Conjunction& b, const Conjunction& c,
                     ClosureAssumption closure, const CalculusOptions& options = {});

/// Dual query.  The affirmative answer is verdict Impermissible.
Judgment impermissible(const KnowledgeBase& kb, const NormStore& store,
                       const std::string& mt, const Conjunction& b, const Conjunction& c,
                       ClosureAssumption closure, const CalculusOptions& options = {});

/// First prohibition that defeats permission P for query (b, c), scanning in
/// ascending timestamp order.  Exception 1.1: a later prohibition whose
/// grounds subsume the permission's, active in c.  Exception 1.2: a
/// prohibition covering b itself whose grounds do not subsume the
/// permission's.
std::optional<Defeater> permission_defeated(
    const KnowledgeBase& kb, const NormStore& store, const std::string& mt,
    const NormFrame& permission, const Conjunction& b, const Conjunction& c,
    const EntailOptions& options = {}, std::vector<DefeatCheck>* checks = nullptr,
    std::vector<std::string>* trace = nullptr);

/// First permission that defeats prohibition Q for query (b, c).  Exception
/// 2.1: a later permission active in c whose grounds the prohibition
/// subsumes.
std::optional<Defeater> prohibition_defeated(
    const KnowledgeBase& kb, const NormStore& store, const std::string& mt,
    const NormFrame& prohibition, const Conjunction& b, const Conjunction& c,
    const EntailOptions& options = {}, std::vector<DefeatCheck>* checks = nullptr,
    std::vector<std::string>* trace = nullptr);

}  // namespace normguard
