#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "normguard/errors.hpp"
#include "normguard/sexpr.hpp"

namespace normguard {

// ── terms ────────────────────────────────────────────────────────────────

/// Function-free term: a constant or a variable.  Variable names carry their
/// leading '?'; constant names never start with '?'.
class Term {
 public:
  static Term variable(std::string name);
  static Term constant(std::string name);
  /// Dispatches on the leading '?' of a raw symbol.
  static Term from_symbol(std::string symbol);

  bool is_variable() const { return variable_; }
  bool is_constant() const { return !variable_; }
  const std::string& name() const { return name_; }

  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;

 private:
  Term(bool variable, std::string name) : variable_(variable), name_(std::move(name)) {}
  bool variable_ = false;
  std::string name_;
};

/// Conventional self-referential agent token.
inline constexpr const char* kSelfToken = "SelfToken";

/// Prefix reserved for constants minted by query freezing.  User-supplied
/// sources must never contain symbols starting with '$'.
inline constexpr char kReservedPrefix = '$';

std::string to_string(const Term& t);

// ── literals and conjunctions ────────────────────────────────────────────

struct Literal {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  bool operator==(const Literal&) const = default;
  auto operator<=>(const Literal&) const = default;
};

std::string to_string(const Literal& l);

/// Conjunction of positive literals.  An empty conjunction is the trivially
/// true context/behavior "(and)".
struct Conjunction {
  std::vector<Literal> literals;

  static Conjunction top() { return {}; }
  bool is_top() const { return literals.empty(); }
  bool is_ground() const;

  /// Removes exact duplicate literals, keeping first occurrences.
  Conjunction normalized() const;

  bool operator==(const Conjunction&) const = default;
};

std::string to_string(const Conjunction& c);

// ── goals and clauses ────────────────────────────────────────────────────

/// Negation as failure over a conjunction; free variables are read
/// existentially (the goal fails if any binding proves the body).
struct Naf {
  Conjunction body;
  bool operator==(const Naf&) const = default;
};

class Goal {
 public:
  static Goal positive(Literal l) { return Goal(std::move(l)); }
  static Goal naf(Conjunction body) { return Goal(Naf{std::move(body)}); }

  bool is_naf() const { return std::holds_alternative<Naf>(node_); }
  const Literal& literal() const { return std::get<Literal>(node_); }
  const Conjunction& naf_body() const { return std::get<Naf>(node_).body; }

  bool operator==(const Goal&) const = default;

 private:
  explicit Goal(Literal l) : node_(std::move(l)) {}
  explicit Goal(Naf n) : node_(std::move(n)) {}
  std::variant<Literal, Naf> node_;
};

std::string to_string(const Goal& g);

struct HornClause {
  Literal head;
  std::vector<Goal> body;
  bool operator==(const HornClause&) const = default;
};

std::string to_string(const HornClause& c);

// ── variables ────────────────────────────────────────────────────────────

void collect_variables(const Term& t, std::vector<std::string>& out);
void collect_variables(const Literal& l, std::vector<std::string>& out);
void collect_variables(const Conjunction& c, std::vector<std::string>& out);
void collect_variables(const Goal& g, std::vector<std::string>& out);

/// Variables of a conjunction in first-occurrence order, deduplicated.
std::vector<std::string> free_variables(const Conjunction& c);

// ── substitution ─────────────────────────────────────────────────────────

/// Variable bindings.  After `resolved()` no binding maps to a variable that
/// itself has a binding, so `apply` is idempotent.
class Substitution {
 public:
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }

  std::optional<Term> lookup(const std::string& var) const;

  /// Follows variable chains to the representative term.
  Term walk(Term t) const;

  void bind(const std::string& var, Term value);

  Term apply(const Term& t) const { return walk(t); }
  Literal apply(const Literal& l) const;
  Conjunction apply(const Conjunction& c) const;
  Goal apply(const Goal& g) const;

  /// Fully walks every bound value.
  Substitution resolved() const;

  /// Keeps only the given variables, dropping entries that walk to themselves.
  Substitution project(const std::vector<std::string>& vars) const;

  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

  bool operator==(const Substitution&) const = default;

 private:
  std::map<std::string, Term> bindings_;
};

std::string to_string(const Substitution& s);

/// Unifies two literals under an existing substitution.  Distinct predicates
/// simply fail; the same predicate at two different arities is an ArityError,
/// never a silent failure.
std::optional<Substitution> unify(const Literal& a, const Literal& b, Substitution s);

// ── s-expression conversions ─────────────────────────────────────────────

/// `allow_reserved` admits '$'-prefixed constants (internal callers only).
Term term_from_sexpr(const SExpr& e, bool allow_reserved = false);
Literal literal_from_sexpr(const SExpr& e, bool allow_reserved = false);
/// Accepts either "(and <literal>*)" or a bare literal.
Conjunction conjunction_from_sexpr(const SExpr& e, bool allow_reserved = false);
/// A body goal: "<literal>" or "(naf <literal>*)".
Goal goal_from_sexpr(const SExpr& e, bool allow_reserved = false);

SExpr to_sexpr(const Literal& l);
SExpr to_sexpr(const Conjunction& c);
SExpr to_sexpr(const Goal& g);

}  // namespace normguard
