#pragma once

#include "normguard/calculus.hpp"

namespace normguard {

/// Literal template whose predicate slot may itself be a variable; it must be
/// bound to a constant by the time the pattern is instantiated.
struct LiteralPattern {
  Term predicate;
  std::vector<Term> args;

  Literal instantiate(const Substitution& s) const;
  bool operator==(const LiteralPattern&) const = default;
};

std::string to_string(const LiteralPattern& p);

/// Binds `facts_var` to the bundled conjunction of current discourse facts
/// and `discourse_var` to the discourse id.
struct DiscoursePre {
  std::string discourse_var;
  std::string facts_var;
  bool operator==(const DiscoursePre&) const = default;
};

/// Proven against the discourse conjunction.  Open variables in the discourse
/// are shared across the whole attempt, so a later precondition can bind what
/// an earlier match left open.
struct GoalPre {
  Goal goal;
  bool operator==(const GoalPre&) const = default;
};

/// "(ist-Information <agent> <pattern>)": a knowledge lookup inside the
/// agent's microtheory.
struct LookupPre {
  Term agent;
  LiteralPattern pattern;
  bool operator==(const LookupPre&) const = default;
};

/// "(ist-Information <agent> (permissible <behavior> <facts-var>))": the
/// norm check.  Variables local to the behavior template stay free and are
/// read universally; method-shared variables still unbound at check time
/// range over the query's existential pool, and each permissible witness is
/// offered to the rest of the proof in turn.
struct NormCheckPre {
  Term agent;
  Conjunction behavior;
  std::string context_var;
  bool operator==(const NormCheckPre&) const = default;
};

using Precondition = std::variant<DiscoursePre, GoalPre, LookupPre, NormCheckPre>;

/// One step of an executed plan; arguments are terms or embedded literals,
/// e.g. (respond ?d (?dis-like ?owner ?object)).
struct ActionStep {
  std::string verb;
  std::vector<std::variant<Term, LiteralPattern>> args;

  bool is_ground() const;
  bool operator==(const ActionStep&) const = default;
};

std::string to_string(const ActionStep& s);

struct Method {
  std::string name;
  Literal action_pattern;                 // flat literal, variables allowed
  std::vector<Precondition> preconditions;
  std::vector<ActionStep> actions;
  std::optional<int> order;               // explicit rank for shared action heads
};

/// Parses the method file shape:
///   (preconditionForMethod (and <precondition>*)
///     (methodForAction <action-literal>
///       (actionSequence (TheList <step>*))))
Method parse_method(std::string_view text);
Method method_from_sexpr(const SExpr& form);
std::string to_string(const Method& m);

/// The bundled respond-to-preference-question method.
std::string default_methods_text();

enum class PlanOutcomeKind { Executed, Refused, NoBinding, NoMethod };
std::string to_string(PlanOutcomeKind k);

struct PlanOutcome {
  PlanOutcomeKind kind = PlanOutcomeKind::NoMethod;
  std::vector<ActionStep> steps;             // ground when kind == Executed
  std::vector<std::string> trace;
  std::optional<Judgment> norm_judgment;     // passing or first failing check
  bool guard_rechecked = false;
  bool guard_violation = false;
};

struct PlanQuery {
  Literal action;                 // may be nonground
  Conjunction discourse;          // current discourse facts
  Term discourse_id = Term::constant("d0");
  ClosureAssumption closure = ClosureAssumption::Prohibitive;
  int depth_limit = KnowledgeBase::kDefaultDepthLimit;
  /// Re-prove the norm check on the final ground instantiation of every
  /// executed plan and flag any disagreement.
  bool recheck_guard = false;
  /// Candidate terms for method-shared variables that reach the norm check
  /// unbound.
  std::vector<Term> existential_pool;
};

/// Flat method registry: no task decomposition, just match-prove-execute
/// with the norm check as a guard rail.  Stateless across attempts; new
/// testimony changes the next attempt's outcome immediately.
class Planner {
 public:
  /// Validates and stores a method.  At most one norm check per method; a
  /// second method for the same (predicate, arity) needs explicit `order` on
  /// both.  Returns the method name.
  std::string register_method(Method m);

  const std::vector<Method>& methods() const { return methods_; }

  PlanOutcome attempt_action(const KnowledgeBase& kb,
                             const std::map<std::string, NormStore>& stores,
                             const PlanQuery& query) const;

 private:
  std::vector<Method> methods_;
};

}  // namespace normguard
