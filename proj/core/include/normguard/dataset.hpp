#pragma once

#include "normguard/dialogue.hpp"

namespace normguard {

/// One synthetic dialogue: speaker A states two preferences and two pieces of
/// testimony whose norms conflict in a declared way, then speaker B asks what
/// A likes.  The label is the oracle-computed response, never hand-entered.
struct DialogueCase {
  ConflictType conflict = ConflictType::Direct;
  int id = 0;
  std::string speaker_a;
  std::string pref1;
  std::string pref2;
  std::string testimony1;
  std::string testimony2;
  std::string speaker_b;
  std::string query;
  std::string label;
  bool operator==(const DialogueCase&) const = default;
};

/// The nine binary factors crossed with the three conflict types: 3 x 2^9 =
/// 1,536 combinations.
struct CaseFactors {
  ConflictType conflict = ConflictType::Direct;
  Polarity pref1_polarity = Polarity::Likes;
  Polarity pref2_polarity = Polarity::Likes;
  bool prefs_same_category = true;      // second object drawn from the same category
  bool permission_first = true;         // testimony order
  bool permission_must = false;         // may vs must
  bool audience_specific = true;        // prohibition names the asker
  bool permission_scope_object = true;  // object topic vs category topic
  bool query_overlap = true;            // first pref object inside the topic scope
  Polarity query_polarity = Polarity::Likes;  // like vs dislike question
  bool operator==(const CaseFactors&) const = default;
};

/// Anchor symbols the grid instantiates; labels are computed under `closure`.
struct GridConfig {
  std::string speaker_a = "Plato";
  std::string speaker_b = "Socrates";
  std::string topic_object = "Juice";    // object-scope topic
  std::string topic_category = "Drink";  // category-scope topic
  std::string overlap_object = "Juice";  // first pref when it overlaps the topic
  std::string overlap_same_cat = "Soda";
  std::string overlap_diff_cat = "Pizza";
  std::string disjoint_object = "Pizza";  // first pref when it does not
  std::string disjoint_same_cat = "Salad";
  std::string disjoint_diff_cat = "AI";
  ClosureAssumption closure = ClosureAssumption::Prohibitive;
  bool operator==(const GridConfig&) const = default;
};

GridConfig grid_config_from_json(const std::string& text);
std::string grid_config_to_json(const GridConfig& cfg);

/// Every factor combination in a fixed order: conflict type outermost
/// (Direct, Indirect, Intersecting), then a 9-bit counter, lowest bit first:
/// pref1 dislike, pref2 dislike, different category, prohibition first,
/// must, any audience, category scope, no overlap, dislike query.
std::vector<CaseFactors> enumerate_grid();

/// Sentences + oracle label for one combination.  The two testimony frames
/// are certified to instantiate the declared conflict type (with a nontrivial
/// shared-act witness for the intersecting kind); a failed certification
/// throws StoreError and aborts generation.
DialogueCase build_case(int id, const CaseFactors& f, const GridConfig& cfg);

std::vector<DialogueCase> generate_dataset(const GridConfig& cfg = {});

/// Computes the label without the entailment or calculus modules: behaviors
/// become finite act sets (object x polarity x hearer), subsumption becomes
/// set inclusion, and the inference rules with their exceptions are applied
/// literally over timestamps.
Response oracle_judge(const DialogueCase& c, ClosureAssumption closure);

/// Feeds the case sentence by sentence through a fresh session and returns
/// the response to the query.  `guard_violations`, when given, receives the
/// session's post-execution recheck failures.
Response run_case(const DialogueCase& c, const SessionConfig& cfg,
                  int* guard_violations = nullptr);

struct CaseResult {
  int id = 0;
  std::string conflict;
  std::string expected;
  std::string got;
  std::vector<std::string> trace;
};

struct EvalReport {
  int total = 0;
  int correct = 0;
  std::map<std::string, std::pair<int, int>> per_conflict;  // type -> correct, total
  std::vector<CaseResult> mismatches;
  int guard_rechecks = 0;
  int guard_violations = 0;
  std::string closure = "prohibitive";
  double seconds = 0.0;
  /// log10 of the chance that picking uniformly among the response inventory
  /// matches every label: total * log10(1/5).
  double chance_agreement_log10 = 0.0;
  bool all_correct() const { return correct == total; }
};

struct EvalOptions {
  ClosureAssumption closure = ClosureAssumption::Prohibitive;
  int depth_limit = KnowledgeBase::kDefaultDepthLimit;
  bool recheck_guard = true;
  int jobs = 1;
};

EvalReport evaluate(const std::vector<DialogueCase>& cases, const EvalOptions& opts = {});

std::string report_to_json(const EvalReport& r);
std::string report_to_text(const EvalReport& r);

/// One case per line, ten pipe-delimited fields, sentence fields quoted.
std::string cases_to_psv(const std::vector<DialogueCase>& cases);
std::vector<DialogueCase> cases_from_psv(std::string_view text);

}  // namespace normguard
