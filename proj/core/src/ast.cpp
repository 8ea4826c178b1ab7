#include "normguard/ast.hpp"

#include <algorithm>

namespace normguard {

// ── terms ────────────────────────────────────────────────────────────────

Term Term::variable(std::string name) {
  if (name.empty() || name.front() != '?')
    throw Error("variable name must start with '?': " + name);
  return Term(true, std::move(name));
}

Term Term::constant(std::string name) {
  if (name.empty()) throw Error("empty constant name");
  if (name.front() == '?')
    throw Error("constant name must not start with '?': " + name);
  return Term(false, std::move(name));
}

Term Term::from_symbol(std::string symbol) {
  if (symbol.empty()) throw Error("empty symbol");
  return symbol.front() == '?' ? variable(std::move(symbol)) : constant(std::move(symbol));
}

std::string to_string(const Term& t) { return t.name(); }

// ── literals and conjunctions ────────────────────────────────────────────

bool Literal::is_ground() const {
  return std::all_of(args.begin(), args.end(),
                     [](const Term& t) { return t.is_constant(); });
}

std::string to_string(const Literal& l) {
  std::string out = "(" + l.predicate;
  for (const Term& t : l.args) out += ' ' + t.name();
  out += ')';
  return out;
}

bool Conjunction::is_ground() const {
  return std::all_of(literals.begin(), literals.end(),
                     [](const Literal& l) { return l.is_ground(); });
}

Conjunction Conjunction::normalized() const {
  Conjunction out;
  for (const Literal& l : literals) {
    if (std::find(out.literals.begin(), out.literals.end(), l) == out.literals.end())
      out.literals.push_back(l);
  }
  return out;
}

std::string to_string(const Conjunction& c) {
  std::string out = "(and";
  for (const Literal& l : c.literals) out += ' ' + to_string(l);
  out += ')';
  return out;
}

std::string to_string(const Goal& g) {
  if (!g.is_naf()) return to_string(g.literal());
  std::string out = "(naf";
  for (const Literal& l : g.naf_body().literals) out += ' ' + to_string(l);
  out += ')';
  return out;
}

std::string to_string(const HornClause& c) {
  std::string out = "(rule " + to_string(c.head);
  for (const Goal& g : c.body) out += ' ' + to_string(g);
  out += ')';
  return out;
}

// ── variables ────────────────────────────────────────────────────────────

void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) out.push_back(t.name());
}

void collect_variables(const Literal& l, std::vector<std::string>& out) {
  for (const Term& t : l.args) collect_variables(t, out);
}

void collect_variables(const Conjunction& c, std::vector<std::string>& out) {
  for (const Literal& l : c.literals) collect_variables(l, out);
}

void collect_variables(const Goal& g, std::vector<std::string>& out) {
  if (g.is_naf())
    collect_variables(g.naf_body(), out);
  else
    collect_variables(g.literal(), out);
}

std::vector<std::string> free_variables(const Conjunction& c) {
  std::vector<std::string> all;
  collect_variables(c, all);
  std::vector<std::string> out;
  for (auto& v : all)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

// ── substitution ─────────────────────────────────────────────────────────

std::optional<Term> Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  if (it == bindings_.end()) return std::nullopt;
  return it->second;
}

Term Substitution::walk(Term t) const {
  while (t.is_variable()) {
    auto it = bindings_.find(t.name());
    if (it == bindings_.end()) break;
    t = it->second;
  }
  return t;
}

void Substitution::bind(const std::string& var, Term value) {
  bindings_.insert_or_assign(var, std::move(value));
}

Literal Substitution::apply(const Literal& l) const {
  Literal out;
  out.predicate = l.predicate;
  out.args.reserve(l.args.size());
  for (const Term& t : l.args) out.args.push_back(walk(t));
  return out;
}

Conjunction Substitution::apply(const Conjunction& c) const {
  Conjunction out;
  out.literals.reserve(c.literals.size());
  for (const Literal& l : c.literals) out.literals.push_back(apply(l));
  return out;
}

Goal Substitution::apply(const Goal& g) const {
  if (g.is_naf()) return Goal::naf(apply(g.naf_body()));
  return Goal::positive(apply(g.literal()));
}

Substitution Substitution::resolved() const {
  Substitution out;
  for (const auto& [var, value] : bindings_) out.bindings_.emplace(var, walk(value));
  return out;
}

Substitution Substitution::project(const std::vector<std::string>& vars) const {
  Substitution out;
  for (const std::string& v : vars) {
    Term rep = walk(Term::variable(v));
    if (rep.is_variable() && rep.name() == v) continue;
    out.bindings_.emplace(v, rep);
  }
  return out;
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, value] : s) {
    if (!first) out += ", ";
    first = false;
    out += var + " -> " + value.name();
  }
  out += '}';
  return out;
}

std::optional<Substitution> unify(const Literal& a, const Literal& b, Substitution s) {
  if (a.predicate != b.predicate) return std::nullopt;
  if (a.args.size() != b.args.size())
    throw ArityError("predicate " + a.predicate + " used at arity " +
                     std::to_string(a.args.size()) + " and " +
                     std::to_string(b.args.size()));
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    Term ta = s.walk(a.args[i]);
    Term tb = s.walk(b.args[i]);
    if (ta == tb) continue;
    if (ta.is_variable())
      s.bind(ta.name(), tb);
    else if (tb.is_variable())
      s.bind(tb.name(), ta);
    else
      return std::nullopt;
  }
  return s.resolved();
}

// ── s-expression conversions ─────────────────────────────────────────────

namespace {

void check_symbol(const SExpr& e, bool allow_reserved) {
  if (!allow_reserved && !e.symbol.empty() && e.symbol.front() == kReservedPrefix)
    throw ParseError("symbol uses reserved prefix '$': " + e.symbol, e.pos);
}

}  // namespace

Term term_from_sexpr(const SExpr& e, bool allow_reserved) {
  if (!e.is_symbol()) throw ParseError("expected a term symbol", e.pos);
  check_symbol(e, allow_reserved);
  return Term::from_symbol(e.symbol);
}

Literal literal_from_sexpr(const SExpr& e, bool allow_reserved) {
  if (!e.is_list() || e.items.empty() || !e.items.front().is_symbol())
    throw ParseError("expected a literal '(<predicate> <term>*)'", e.pos);
  const SExpr& head = e.items.front();
  if (head.symbol.front() == '?')
    throw ParseError("literal predicate cannot be a variable: " + head.symbol, head.pos);
  check_symbol(head, allow_reserved);
  Literal l;
  l.predicate = head.symbol;
  for (std::size_t i = 1; i < e.items.size(); ++i)
    l.args.push_back(term_from_sexpr(e.items[i], allow_reserved));
  return l;
}

Conjunction conjunction_from_sexpr(const SExpr& e, bool allow_reserved) {
  Conjunction c;
  if (e.is_list() && e.head() == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i)
      c.literals.push_back(literal_from_sexpr(e.items[i], allow_reserved));
    return c;
  }
  c.literals.push_back(literal_from_sexpr(e, allow_reserved));
  return c;
}

Goal goal_from_sexpr(const SExpr& e, bool allow_reserved) {
  if (e.is_list() && e.head() == "naf") {
    Conjunction body;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      body.literals.push_back(literal_from_sexpr(e.items[i], allow_reserved));
    return Goal::naf(std::move(body));
  }
  return Goal::positive(literal_from_sexpr(e, allow_reserved));
}

SExpr to_sexpr(const Literal& l) {
  std::vector<SExpr> items;
  items.push_back(SExpr::make_symbol(l.predicate));
  for (const Term& t : l.args) items.push_back(SExpr::make_symbol(t.name()));
  return SExpr::make_list(std::move(items));
}

SExpr to_sexpr(const Conjunction& c) {
  std::vector<SExpr> items;
  items.push_back(SExpr::make_symbol("and"));
  for (const Literal& l : c.literals) items.push_back(to_sexpr(l));
  return SExpr::make_list(std::move(items));
}

SExpr to_sexpr(const Goal& g) {
  if (!g.is_naf()) return to_sexpr(g.literal());
  std::vector<SExpr> items;
  items.push_back(SExpr::make_symbol("naf"));
  for (const Literal& l : g.naf_body().literals) items.push_back(to_sexpr(l));
  return SExpr::make_list(std::move(items));
}

}  // namespace normguard
