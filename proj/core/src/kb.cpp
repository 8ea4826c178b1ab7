#include "normguard/kb.hpp"

#include <algorithm>

namespace normguard {

// ── store mutation ───────────────────────────────────────────────────────

void KnowledgeBase::create_microtheory(const std::string& name) {
  if (name.empty() || name.front() == kReservedPrefix)
    throw StoreError("bad microtheory name: " + name);
  mts_.emplace(name, Microtheory{name, {}, {}, {}});
}

bool KnowledgeBase::has_microtheory(const std::string& name) const {
  return mts_.count(name) != 0;
}

const Microtheory& KnowledgeBase::microtheory(const std::string& name) const {
  auto it = mts_.find(name);
  if (it == mts_.end()) throw UnknownMicrotheoryError("unknown microtheory: " + name);
  return it->second;
}

std::vector<std::string> KnowledgeBase::microtheory_names() const {
  std::vector<std::string> out;
  for (const auto& [name, mt] : mts_) out.push_back(name);
  return out;
}

Microtheory& KnowledgeBase::mutable_mt(const std::string& name) {
  auto it = mts_.find(name);
  if (it == mts_.end()) throw UnknownMicrotheoryError("unknown microtheory: " + name);
  return it->second;
}

void KnowledgeBase::add_genl_mt(const std::string& child, const std::string& parent) {
  Microtheory& c = mutable_mt(child);
  microtheory(parent);
  if (std::find(c.parents.begin(), c.parents.end(), parent) != c.parents.end()) return;

  // Reject the link if parent already reaches child.
  std::vector<std::string> stack
      {parent};
  std::vector<std::string> seen;
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (cur == child)
      throw CycleError("genlMt link " + child + " -> " + parent + " would create a cycle");
    if (std::find(seen.begin(), seen.end(), cur) != seen.end()) continue;
    seen.push_back(cur);
    for (const std::string& p : microtheory(cur).parents) stack.push_back(p);
  }
  c.parents.push_back(parent);
}

void KnowledgeBase::register_literal(const Literal& l) {
  if (l.predicate.empty() || l.predicate.front() == kReservedPrefix)
    throw StoreError("bad predicate name: " + l.predicate);
  auto [it, inserted] = arity_.emplace(l.predicate, l.args.size());
  if (!inserted && it->second != l.args.size())
    throw ArityError("predicate " + l.predicate + " declared at arity " +
                     std::to_string(it->second) + ", used at arity " +
                     std::to_string(l.args.size()));
}

void KnowledgeBase::register_goal(const Goal& g) {
  if (g.is_naf()) {
    for (const Literal& l : g.naf_body().literals) register_literal(l);
  } else {
    register_literal(g.literal());
  }
}

void KnowledgeBase::assert_fact(const std::string& mt, Literal fact) {
  if (!fact.is_ground())
    throw StoreError("facts must be ground: " + to_string(fact));
  for (const Term& t : fact.args)
    if (t.name().front() == kReservedPrefix)
      throw StoreError("reserved constant in fact: " + to_string(fact));
  register_literal(fact);
  Microtheory& m = mutable_mt(mt);
  if (std::find(m.facts.begin(), m.facts.end(), fact) != m.facts.end()) return;
  m.facts.push_back(std::move(fact));
}

void KnowledgeBase::assert_rule(const std::string& mt, HornClause rule) {
  register_literal(rule.head);
  for (const Goal& g : rule.body) register_goal(g);
  mutable_mt(mt).rules.push_back(std::move(rule));
}

std::optional<std::size_t> KnowledgeBase::arity_of(const std::string& predicate) const {
  auto it = arity_.find(predicate);
  if (it == arity_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> KnowledgeBase::visible_from(const std::string& mt) const {
  std::vector<std::string> order;
  std::vector<std::string> stack{mt};
  // Depth-first, own microtheory first, parents in link order.
  while (!stack.empty()) {
    std::string cur = stack.front();
    stack.erase(stack.begin());
    if (std::find(order.begin(), order.end(), cur) != order.end()) continue;
    order.push_back(cur);
    const Microtheory& m = microtheory(cur);
    for (std::size_t i = 0; i < m.parents.size(); ++i)
      stack.insert(stack.begin() + static_cast<long>(i), m.parents[i]);
  }
  return order;
}

// ── resolution ───────────────────────────────────────────────────────────

void KnowledgeBase::check_query_arity(std::span<const Goal> goals,
                                      const std::vector<Literal>* scratch) const {
  // Arity coherence for a read-only query: every predicate must agree with
  // the registry; predicates unknown to the store only need to be coherent
  // within the query itself.
  std::map<std::string, std::size_t> local = arity_;
  auto check = [&local](const Literal& l) {
    auto [it, inserted] = local.emplace(l.predicate, l.args.size());
    if (!inserted && it->second != l.args.size())
      throw ArityError("predicate " + l.predicate + " used at arity " +
                       std::to_string(l.args.size()) + ", expected " +
                       std::to_string(it->second));
  };
  if (scratch)
    for (const Literal& l : *scratch) check(l);
  for (const Goal& g : goals) {
    if (g.is_naf())
      for (const Literal& l : g.naf_body().literals) check(l);
    else
      check(g.literal());
  }
}

namespace {

/// Depth-first SLD resolution with negation as failure.  The depth budget
/// counts resolution steps along the current derivation path; exhausting it
/// marks the result instead of failing silently.
class Engine {
 public:
  Engine(const KnowledgeBase& kb, std::vector<const Microtheory*> visible,
         const std::vector<Literal>* scratch, std::size_t max_solutions)
      : kb_(kb), visible_(std::move(visible)), scratch_(scratch),
        max_solutions_(max_solutions) {}

  SolveResult run(std::span<const Goal> goals, int depth_limit) {
    std::vector<std::string> vars;
    for (const Goal& g : goals) collect_variables(g, vars);
    std::vector<std::string> unique_vars;
    for (auto& v : vars)
      if (std::find(unique_vars.begin(), unique_vars.end(), v) == unique_vars.end())
        unique_vars.push_back(v);
    query_vars_ = std::move(unique_vars);

    std::vector<Goal> list(goals.begin(), goals.end());
    prove(list, 0, Substitution{}, depth_limit);
    return std::move(result_);
  }

 private:
  // Returns false when the search should stop (solution quota reached).
  bool prove(const std::vector<Goal>& goals, std::size_t idx, const Substitution& s,
             int depth) {
    if (idx == goals.size()) {
      result_.solutions.push_back(s.project(query_vars_));
      return result_.solutions.size() < max_solutions_;
    }
    const Goal& g = goals[idx];
    if (g.is_naf()) return prove_naf(goals, idx, s, depth);
    return prove_positive(goals, idx, s, depth);
  }

  bool prove_naf(const std::vector<Goal>& goals, std::size_t idx, const Substitution& s,
                 int depth) {
    if (depth <= 0) {
      result_.depth_exceeded = true;
      return true;
    }
    std::vector<Goal> inner;
    for (const Literal& l : g_body(goals[idx]).literals)
      inner.push_back(Goal::positive(s.apply(l)));

    Engine sub(kb_, visible_, scratch_, 1);
    SolveResult r = sub.run(inner, depth - 1);
    if (r.succeeded()) return true;          // definite proof: naf fails
    if (r.depth_exceeded) {                  // unfinished search: stay honest
      result_.depth_exceeded = true;
      return true;
    }
    return prove(goals, idx + 1, s, depth - 1);
  }

  static const Conjunction& g_body(const Goal& g) { return g.naf_body(); }

  bool prove_positive(const std::vector<Goal>& goals, std::size_t idx,
                      const Substitution& s, int depth) {
    if (depth <= 0) {
      result_.depth_exceeded = true;
      return true;
    }
    return expand(goals[idx].literal(), goals, idx, s, depth);
  }

  bool expand(const Literal& goal_raw, const std::vector<Goal>& goals, std::size_t idx,
              const Substitution& s, int depth) {
    Literal goal = s.apply(goal_raw);

    // Facts first: scratch overlay, then each visible microtheory.
    if (scratch_) {
      for (const Literal& f : *scratch_) {
        if (f.predicate != goal.predicate) continue;
        if (auto s2 = unify(goal, f, s)) {
          if (!prove(goals, idx + 1, *s2, depth - 1)) return false;
        }
      }
    }
    for (const Microtheory* m : visible_) {
      for (const Literal& f : m->facts) {
        if (f.predicate != goal.predicate) continue;
        if (auto s2 = unify(goal, f, s)) {
          if (!prove(goals, idx + 1, *s2, depth - 1)) return false;
        }
      }
    }

    // Rules in assertion order within each visible microtheory.
    for (const Microtheory* m : visible_) {
      for (const HornClause& r : m->rules) {
        if (r.head.predicate != goal.predicate) continue;
        HornClause fresh = rename_apart(r);
        auto s2 = unify(goal, fresh.head, s);
        if (!s2) continue;
        std::vector<Goal> extended;
        extended.reserve(fresh.body.size() + goals.size() - idx - 1);
        for (const Goal& g : fresh.body) extended.push_back(g);
        for (std::size_t i = idx + 1; i < goals.size(); ++i) extended.push_back(goals[i]);
        if (!prove(extended, 0, *s2, depth - 1)) return false;
      }
    }
    return true;
  }

  HornClause rename_apart(const HornClause& r) {
    ++rename_counter_;
    const std::string suffix = "~" + std::to_string(rename_counter_);
    auto rename_term = [&suffix](const Term& t) {
      return t.is_variable() ? Term::variable(t.name() + suffix) : t;
    };
    auto rename_literal = [&rename_term](const Literal& l) {
      Literal out;
      out.predicate = l.predicate;
      for (const Term& t : l.args) out.args.push_back(rename_term(t));
      return out;
    };
    HornClause out;
    out.head = rename_literal(r.head);
    for (const Goal& g : r.body) {
      if (g.is_naf()) {
        Conjunction body;
        for (const Literal& l : g.naf_body().literals)
          body.literals.push_back(rename_literal(l));
        out.body.push_back(Goal::naf(std::move(body)));
      } else {
        out.body.push_back(Goal::positive(rename_literal(g.literal())));
      }
    }
    return out;
  }

  const KnowledgeBase& kb_;
  std::vector<const Microtheory*> visible_;
  const std::vector<Literal>* scratch_;
  std::size_t max_solutions_;
  std::vector<std::string> query_vars_;
  SolveResult result_;
  std::uint64_t rename_counter_ = 0;
};

}  // namespace

SolveResult KnowledgeBase::solve(std::span<const Goal> goals, const std::string& mt,
                                 const SolveOptions& options) const {
  check_query_arity(goals, options.scratch);
  std::vector<const Microtheory*> visible;
  for (const std::string& name : visible_from(mt)) visible.push_back(&microtheory(name));
  Engine engine(*this, std::move(visible), options.scratch, options.max_solutions);
  return engine.run(goals, options.depth_limit);
}

SolveResult KnowledgeBase::solve(const std::vector<Goal>& goals, const std::string& mt,
                                 const SolveOptions& options) const {
  return solve(std::span<const Goal>(goals), mt, options);
}

// ── textual format ───────────────────────────────────────────────────────

void KnowledgeBase::load_text(std::string_view text) {
  std::string current;
  for (const SExpr& form : parse_sexprs(text)) {
    if (!form.is_list())
      throw ParseError("expected a top-level form", form.pos);
    const std::string_view head = form.head();
    if (head == "mt") {
      if (form.items.size() != 2 || !form.items[1].is_symbol())
        throw ParseError("expected (mt <name>)", form.pos);
      current = form.items[1].symbol;
      if (!has_microtheory(current)) create_microtheory(current);
    } else if (head == "genlMt") {
      if (form.items.size() != 3 || !form.items[1].is_symbol() || !form.items[2].is_symbol())
        throw ParseError("expected (genlMt <child> <parent>)", form.pos);
      add_genl_mt(form.items[1].symbol, form.items[2].symbol);
    } else if (head == "fact") {
      if (current.empty())
        throw ParseError("(fact ...) before any (mt ...) section", form.pos);
      if (form.items.size() != 2)
        throw ParseError("expected (fact <literal>)", form.pos);
      assert_fact(current, literal_from_sexpr(form.items[1]));
    } else if (head == "rule") {
      if (current.empty())
        throw ParseError("(rule ...) before any (mt ...) section", form.pos);
      if (form.items.size() < 2)
        throw ParseError("expected (rule <head> <body-goal>*)", form.pos);
      HornClause rule;
      rule.head = literal_from_sexpr(form.items[1]);
      for (std::size_t i = 2; i < form.items.size(); ++i)
        rule.body.push_back(goal_from_sexpr(form.items[i]));
      assert_rule(current, std::move(rule));
    } else {
      throw ParseError("unknown form: " + std::string(head), form.pos);
    }
  }
}

std::string KnowledgeBase::save_text() const {
  std::string out;
  for (const auto& [name, m] : mts_) {
    out += "(mt " + name + ")\n";
    for (const Literal& f : m.facts) out += "(fact " + to_string(f) + ")\n";
    for (const HornClause& r : m.rules) out += to_string(r) + "\n";
  }
  for (const auto& [name, m] : mts_) {
    for (const std::string& p : m.parents)
      out += "(genlMt " + name + " " + p + ")\n";
  }
  return out;
}

}  // namespace normguard
