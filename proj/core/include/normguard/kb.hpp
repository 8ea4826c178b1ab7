#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "normguard/ast.hpp"

namespace normguard {

/// Named fact/rule partition.  `parents` lists inheritance links in the order
/// they were added; a microtheory sees its own contents plus everything its
/// transitive parents hold.
struct Microtheory {
  std::string name;
  std::vector<Literal> facts;      // ground, set semantics, assertion order
  std::vector<HornClause> rules;   // assertion order
  std::vector<std::string> parents;

  bool operator==(const Microtheory&) const = default;
};

struct SolveOptions {
  int depth_limit = 512;
  std::size_t max_solutions = SIZE_MAX;
  /// Extra ground facts visible as an anonymous scratch child of the queried
  /// microtheory.  Lets entailment probes run without mutating the store.
  const std::vector<Literal>* scratch = nullptr;
};

struct SolveResult {
  std::vector<Substitution> solutions;  // projected onto the query's variables
  /// A branch was cut by the depth budget.  Solutions found remain sound, but
  /// an empty result must not be read as definite failure.
  bool depth_exceeded = false;

  bool succeeded() const { return !solutions.empty(); }
};

/// Function-free Horn-clause store partitioned into microtheories, with
/// depth-bounded backward chaining and negation as failure.
class KnowledgeBase {
 public:
  static constexpr int kDefaultDepthLimit = 512;

  void create_microtheory(const std::string& name);
  bool has_microtheory(const std::string& name) const;
  const Microtheory& microtheory(const std::string& name) const;
  std::vector<std::string> microtheory_names() const;

  /// Links child to parent; both must exist and the link must keep the
  /// inheritance graph acyclic.
  void add_genl_mt(const std::string& child, const std::string& parent);

  /// Asserts a ground fact.  Duplicate facts are ignored (set semantics).
  void assert_fact(const std::string& mt, Literal fact);

  /// Asserts a rule; the body may mix positive goals and naf blocks.
  void assert_rule(const std::string& mt, HornClause rule);

  /// Arity registered for a predicate, if it has been seen.
  std::optional<std::size_t> arity_of(const std::string& predicate) const;

  /// Microtheories visible from `mt`: itself first, then parents depth-first
  /// in link order, deduplicated.
  std::vector<std::string> visible_from(const std::string& mt) const;

  /// Proves the goal list left to right, enumerating every derivable
  /// substitution in a deterministic order (facts before rules, assertion
  /// order within each, microtheories in visibility order).
  SolveResult solve(std::span<const Goal> goals, const std::string& mt,
                    const SolveOptions& options = {}) const;
  SolveResult solve(const std::vector<Goal>& goals, const std::string& mt,
                    const SolveOptions& options = {}) const;

  /// Loads the textual format: (mt <name>), (genlMt <child> <parent>),
  /// (fact <literal>), (rule <head> <body-goal>*).  Facts and rules attach to
  /// the most recent (mt ...) section.
  void load_text(std::string_view text);

  /// Serializes the store back into the textual format.
  std::string save_text() const;

  bool operator==(const KnowledgeBase&) const = default;

 private:
  Microtheory& mutable_mt(const std::string& name);
  void register_literal(const Literal& l);
  void register_goal(const Goal& g);
  void check_query_arity(std::span<const Goal> goals,
                         const std::vector<Literal>* scratch) const;

  std::map<std::string, Microtheory> mts_;
  std::map<std::string, std::size_t> arity_;
};

}  // namespace normguard
