#include "normguard/planner.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace normguard {

namespace {

bool is_var_name(const std::string& s) { return !s.empty() && s[0] == '?'; }

Term rename_term(const Term& t, const std::string& suffix) {
  if (t.is_variable()) return Term::variable(t.name() + suffix);
  return t;
}

LiteralPattern rename_pattern(const LiteralPattern& p, const std::string& suffix) {
  LiteralPattern out{rename_term(p.predicate, suffix), {}};
  for (const auto& a : p.args) out.args.push_back(rename_term(a, suffix));
  return out;
}

Literal rename_literal(const Literal& l, const std::string& suffix) {
  Literal out;
  out.predicate = l.predicate;
  for (const auto& a : l.args) out.args.push_back(rename_term(a, suffix));
  return out;
}

Conjunction rename_conjunction(const Conjunction& c, const std::string& suffix) {
  Conjunction out;
  for (const auto& l : c.literals) out.literals.push_back(rename_literal(l, suffix));
  return out;
}

Goal rename_goal(const Goal& g, const std::string& suffix) {
  if (g.is_naf()) return Goal::naf(rename_conjunction(g.naf_body(), suffix));
  return Goal::positive(rename_literal(g.literal(), suffix));
}

std::string rename_var_name(const std::string& name, const std::string& suffix) {
  return name + suffix;
}

Method rename_method(const Method& m, const std::string& suffix) {
  Method out;
  out.name = m.name;
  out.action_pattern = rename_literal(m.action_pattern, suffix);
  out.order = m.order;
  for (const auto& pre : m.preconditions) {
    if (const auto* d = std::get_if<DiscoursePre>(&pre)) {
      out.preconditions.push_back(DiscoursePre{
          rename_var_name(d->discourse_var, suffix),
          rename_var_name(d->facts_var, suffix)});
    } else if (const auto* g = std::get_if<GoalPre>(&pre)) {
      out.preconditions.push_back(GoalPre{rename_goal(g->goal, suffix)});
    } else if (const auto* lk = std::get_if<LookupPre>(&pre)) {
      out.preconditions.push_back(LookupPre{rename_term(lk->agent, suffix),
                                            rename_pattern(lk->pattern, suffix)});
    } else {
      const auto& nc = std::get<NormCheckPre>(pre);
      out.preconditions.push_back(NormCheckPre{
          rename_term(nc.agent, suffix),
          rename_conjunction(nc.behavior, suffix),
          rename_var_name(nc.context_var, suffix)});
    }
  }
  for (const auto& step : m.actions) {
    ActionStep s;
    s.verb = step.verb;
    for (const auto& arg : step.args) {
      if (const auto* t = std::get_if<Term>(&arg)) {
        s.args.emplace_back(rename_term(*t, suffix));
      } else {
        s.args.emplace_back(rename_pattern(std::get<LiteralPattern>(arg), suffix));
      }
    }
    out.actions.push_back(std::move(s));
  }
  return out;
}

void collect_pattern_vars(const LiteralPattern& p, std::vector<std::string>& out) {
  if (p.predicate.is_variable()) out.push_back(p.predicate.name());
  for (const auto& a : p.args) {
    if (a.is_variable()) out.push_back(a.name());
  }
}

/// Every variable of the method that occurs outside the norm check's
/// behavior template; behavior variables not in this set are local to the
/// check and stay free (read universally by the evaluation).
std::set<std::string> shared_vars_outside_norm_check(const Method& m) {
  std::set<std::string> out;
  auto add_lit = [&](const Literal& l) {
    for (const auto& a : l.args) {
      if (a.is_variable()) out.insert(a.name());
    }
  };
  add_lit(m.action_pattern);
  for (const auto& pre : m.preconditions) {
    if (const auto* d = std::get_if<DiscoursePre>(&pre)) {
      out.insert(d->discourse_var);
      out.insert(d->facts_var);
    } else if (const auto* g = std::get_if<GoalPre>(&pre)) {
      if (g->goal.is_naf()) {
        for (const auto& l : g->goal.naf_body().literals) add_lit(l);
      } else {
        add_lit(g->goal.literal());
      }
    } else if (const auto* lk = std::get_if<LookupPre>(&pre)) {
      if (lk->agent.is_variable()) out.insert(lk->agent.name());
      std::vector<std::string> vs;
      collect_pattern_vars(lk->pattern, vs);
      out.insert(vs.begin(), vs.end());
    } else {
      const auto& nc = std::get<NormCheckPre>(pre);
      if (nc.agent.is_variable()) out.insert(nc.agent.name());
      out.insert(nc.context_var);
    }
  }
  for (const auto& step : m.actions) {
    for (const auto& arg : step.args) {
      if (const auto* t = std::get_if<Term>(&arg)) {
        if (t->is_variable()) out.insert(t->name());
      } else {
        std::vector<std::string> vs;
        collect_pattern_vars(std::get<LiteralPattern>(arg), vs);
        out.insert(vs.begin(), vs.end());
      }
    }
  }
  return out;
}

}  // namespace

Literal LiteralPattern::instantiate(const Substitution& s) const {
  Term pred = s.walk(predicate);
  if (!pred.is_constant()) {
    throw PlanError("pattern predicate " + predicate.name() +
                    " is unbound at instantiation time");
  }
  Literal out;
  out.predicate = pred.name();
  for (const auto& a : args) out.args.push_back(s.walk(a));
  return out;
}

std::string to_string(const LiteralPattern& p) {
  std::ostringstream os;
  os << '(' << p.predicate.name();
  for (const auto& a : p.args) os << ' ' << a.name();
  os << ')';
  return os.str();
}

bool ActionStep::is_ground() const {
  for (const auto& arg : args) {
    if (const auto* t = std::get_if<Term>(&arg)) {
      if (!t->is_constant()) return false;
    } else {
      const auto& p = std::get<LiteralPattern>(arg);
      if (!p.predicate.is_constant()) return false;
      for (const auto& a : p.args) {
        if (!a.is_constant()) return false;
      }
    }
  }
  return true;
}

std::string to_string(const ActionStep& s) {
  std::ostringstream os;
  os << '(' << s.verb;
  for (const auto& arg : s.args) {
    os << ' ';
    if (const auto* t = std::get_if<Term>(&arg)) {
      os << t->name();
    } else {
      os << to_string(std::get<LiteralPattern>(arg));
    }
  }
  os << ')';
  return os.str();
}

namespace {

LiteralPattern pattern_from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.items.empty()) {
    throw ParseError("expected a literal pattern", e.pos);
  }
  const SExpr& head = e.items.front();
  if (!head.is_symbol()) {
    throw ParseError("pattern head must be a symbol or variable", head.pos);
  }
  LiteralPattern out{Term::from_symbol(head.symbol), {}};
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& a = e.items[i];
    if (!a.is_symbol()) {
      throw ParseError("pattern arguments must be atomic", a.pos);
    }
    out.args.push_back(Term::from_symbol(a.symbol));
  }
  return out;
}

Precondition precondition_from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.items.empty() || !e.items.front().is_symbol()) {
    throw ParseError("expected a precondition form", e.pos);
  }
  const std::string& head = e.items.front().symbol;
  if (head == "factsInDiscourse") {
    if (e.items.size() != 3 || !e.items[1].is_symbol() || !e.items[2].is_symbol() ||
        !is_var_name(e.items[1].symbol) || !is_var_name(e.items[2].symbol)) {
      throw ParseError("factsInDiscourse takes two variables", e.pos);
    }
    return DiscoursePre{e.items[1].symbol, e.items[2].symbol};
  }
  if (head == "ist-Information") {
    if (e.items.size() != 3 || !e.items[1].is_symbol() || !e.items[2].is_list()) {
      throw ParseError("ist-Information takes an agent and a sentence", e.pos);
    }
    Term agent = Term::from_symbol(e.items[1].symbol);
    const SExpr& sentence = e.items[2];
    if (!sentence.items.empty() && sentence.items.front().is_symbol() &&
        sentence.items.front().symbol == "permissible") {
      if (sentence.items.size() != 3 || !sentence.items[2].is_symbol() ||
          !is_var_name(sentence.items[2].symbol)) {
        throw ParseError(
            "permissible takes a behavior conjunction and a facts variable",
            sentence.pos);
      }
      return NormCheckPre{agent, conjunction_from_sexpr(sentence.items[1]),
                          sentence.items[2].symbol};
    }
    return LookupPre{agent, pattern_from_sexpr(sentence)};
  }
  if (head == "naf" || head == "not") {
    return GoalPre{goal_from_sexpr(e)};
  }
  return GoalPre{Goal::positive(literal_from_sexpr(e))};
}

ActionStep step_from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.items.empty() || !e.items.front().is_symbol() ||
      is_var_name(e.items.front().symbol)) {
    throw ParseError("expected an action step with a fixed verb", e.pos);
  }
  ActionStep out;
  out.verb = e.items.front().symbol;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& a = e.items[i];
    if (a.is_symbol()) {
      out.args.emplace_back(Term::from_symbol(a.symbol));
    } else {
      out.args.emplace_back(pattern_from_sexpr(a));
    }
  }
  return out;
}

}  // namespace

Method method_from_sexpr(const SExpr& form) {
  if (!form.is_list() || form.items.size() < 3 || !form.items.front().is_symbol() ||
      form.items.front().symbol != "preconditionForMethod") {
    throw ParseError("expected (preconditionForMethod ...)", form.pos);
  }
  if (form.items.size() > 4) {
    throw ParseError("too many clauses in preconditionForMethod", form.pos);
  }
  Method m;
  const SExpr& pre = form.items[1];
  if (!pre.is_list() || pre.items.empty() || !pre.items.front().is_symbol() ||
      pre.items.front().symbol != "and") {
    throw ParseError("preconditions must be an (and ...) form", pre.pos);
  }
  for (std::size_t i = 1; i < pre.items.size(); ++i) {
    m.preconditions.push_back(precondition_from_sexpr(pre.items[i]));
  }
  const SExpr& mfa = form.items[2];
  if (!mfa.is_list() || mfa.items.size() != 3 || !mfa.items.front().is_symbol() ||
      mfa.items.front().symbol != "methodForAction") {
    throw ParseError("expected (methodForAction <action> (actionSequence ...))",
                     mfa.pos);
  }
  m.action_pattern = literal_from_sexpr(mfa.items[1]);
  const SExpr& seq = mfa.items[2];
  if (!seq.is_list() || seq.items.size() != 2 || !seq.items.front().is_symbol() ||
      seq.items.front().symbol != "actionSequence") {
    throw ParseError("expected (actionSequence (TheList ...))", seq.pos);
  }
  const SExpr& lst = seq.items[1];
  if (!lst.is_list() || lst.items.empty() || !lst.items.front().is_symbol() ||
      lst.items.front().symbol != "TheList") {
    throw ParseError("expected (TheList <step>*)", lst.pos);
  }
  for (std::size_t i = 1; i < lst.items.size(); ++i) {
    m.actions.push_back(step_from_sexpr(lst.items[i]));
  }
  if (form.items.size() == 4) {
    const SExpr& ord = form.items[3];
    if (!ord.is_list() || ord.items.size() != 2 || !ord.items.front().is_symbol() ||
        ord.items.front().symbol != "order" || !ord.items[1].is_symbol()) {
      throw ParseError("expected (order <int>)", ord.pos);
    }
    try {
      m.order = std::stoi(ord.items[1].symbol);
    } catch (const std::exception&) {
      throw ParseError("order must be an integer", ord.items[1].pos);
    }
  }
  m.name = m.action_pattern.predicate + "/" +
           std::to_string(m.action_pattern.args.size());
  return m;
}

Method parse_method(std::string_view text) {
  return method_from_sexpr(parse_sexpr(text));
}

std::string to_string(const Method& m) {
  std::ostringstream os;
  os << "(preconditionForMethod\n  (and";
  for (const auto& pre : m.preconditions) {
    os << "\n    ";
    if (const auto* d = std::get_if<DiscoursePre>(&pre)) {
      os << "(factsInDiscourse " << d->discourse_var << ' ' << d->facts_var << ')';
    } else if (const auto* g = std::get_if<GoalPre>(&pre)) {
      os << to_string(to_sexpr(g->goal));
    } else if (const auto* lk = std::get_if<LookupPre>(&pre)) {
      os << "(ist-Information " << lk->agent.name() << ' '
         << to_string(lk->pattern) << ')';
    } else {
      const auto& nc = std::get<NormCheckPre>(pre);
      os << "(ist-Information " << nc.agent.name() << "\n      (permissible "
         << to_string(to_sexpr(nc.behavior)) << ' ' << nc.context_var << "))";
    }
  }
  os << ")\n  (methodForAction " << to_string(to_sexpr(m.action_pattern))
     << "\n    (actionSequence (TheList";
  for (const auto& step : m.actions) os << ' ' << to_string(step);
  os << ")))";
  if (m.order) os << "\n  (order " << *m.order << ')';
  os << ")\n";
  return os.str();
}

std::string default_methods_text() {
  return R"((preconditionForMethod
  (and
    (factsInDiscourse ?d ?d-facts)
    (askingPreference ?dis-like ?object ?owner ?asker)
    (ist-Information ?owner (?dis-like ?owner ?object))
    (ist-Information ?owner
      (permissible (and (isa ?share SharingPref)
                        (prefOwner ?share ?owner)
                        (object ?share ?object)
                        (polarity ?share ?dis-like)
                        (hearer ?share ?asker))
                   ?d-facts)))
  (methodForAction (respondToUser ?d ?dis-like ?object ?owner ?asker)
    (actionSequence (TheList (respond ?d (?dis-like ?owner ?object))))))
)";
}

std::string to_string(PlanOutcomeKind k) {
  switch (k) {
    case PlanOutcomeKind::Executed: return "Executed";
    case PlanOutcomeKind::Refused: return "Refused";
    case PlanOutcomeKind::NoBinding: return "NoBinding";
    case PlanOutcomeKind::NoMethod: return "NoMethod";
  }
  return "NoMethod";
}

std::string Planner::register_method(Method m) {
  int norm_checks = 0;
  std::set<std::string> facts_vars;
  for (const auto& pre : m.preconditions) {
    if (const auto* d = std::get_if<DiscoursePre>(&pre)) {
      facts_vars.insert(d->facts_var);
    } else if (const auto* nc = std::get_if<NormCheckPre>(&pre)) {
      ++norm_checks;
      if (!facts_vars.count(nc->context_var)) {
        throw PlanError("norm check context " + nc->context_var +
                        " is not bound by a preceding factsInDiscourse");
      }
    }
  }
  if (norm_checks > 1) {
    throw PlanError("method " + m.name + " declares more than one norm check");
  }
  for (const auto& existing : methods_) {
    if (existing.action_pattern.predicate == m.action_pattern.predicate &&
        existing.action_pattern.args.size() == m.action_pattern.args.size() &&
        (!existing.order || !m.order)) {
      throw PlanError("a second method for " + m.name +
                      " needs explicit (order n) on both methods");
    }
  }
  methods_.push_back(std::move(m));
  std::stable_sort(methods_.begin(), methods_.end(),
                   [](const Method& a, const Method& b) {
                     return a.order.value_or(0) < b.order.value_or(0);
                   });
  return methods_.back().name;
}

namespace {

/// Mutable search state shared across one attempt's backtracking proof.
struct AttemptState {
  const KnowledgeBase& kb;
  const std::map<std::string, NormStore>& stores;
  const PlanQuery& query;
  const std::set<std::string>* shared_vars = nullptr;
  std::map<std::string, Conjunction>* facts_bindings = nullptr;
  bool norm_check_failed = false;
  bool lookup_failed = false;
  std::optional<Judgment> failing_judgment;
  std::optional<Judgment> passing_judgment;
  std::vector<std::string> trace;
  std::optional<Substitution> solution;
};

const NormStore& store_for(const AttemptState& st, const std::string& agent) {
  static const NormStore empty("");
  auto it = st.stores.find(agent);
  return it == st.stores.end() ? empty : it->second;
}

std::string resolve_agent(const Substitution& s, const Term& agent) {
  Term t = s.walk(agent);
  if (!t.is_constant()) {
    throw PlanError("agent term " + agent.name() + " is unbound at check time");
  }
  return t.name();
}

bool prove_preconditions(const Method& m, std::size_t idx, const Substitution& s,
                         AttemptState& st);

/// Matches one positive literal against the discourse conjunction, recursing
/// into the continuation for every successful unification.
bool match_discourse(const Method& m, std::size_t idx, const Literal& want,
                     const Substitution& s, AttemptState& st) {
  bool any = false;
  for (const auto& fact : st.query.discourse.literals) {
    if (fact.predicate != want.predicate) continue;
    if (auto s2 = unify(want, fact, s)) {
      any = true;
      if (prove_preconditions(m, idx + 1, *s2, st)) return true;
    }
  }
  if (!any) st.lookup_failed = true;
  return false;
}

/// Can the whole conjunction be matched inside the discourse under s?
bool discourse_satisfies(const std::vector<Literal>& body, std::size_t at,
                         const Substitution& s, const Conjunction& discourse) {
  if (at == body.size()) return true;
  for (const auto& fact : discourse.literals) {
    if (auto s2 = unify(body[at], fact, s)) {
      if (discourse_satisfies(body, at + 1, *s2, discourse)) return true;
    }
  }
  return false;
}

bool prove_norm_check(const Method& m, std::size_t idx, const NormCheckPre& nc,
                      const Substitution& s, AttemptState& st) {
  const std::string agent = resolve_agent(s, nc.agent);
  const NormStore& store = store_for(st, agent);

  auto it = st.facts_bindings->find(nc.context_var);
  if (it == st.facts_bindings->end()) {
    throw PlanError("norm check context " + nc.context_var + " never bound");
  }
  Conjunction context = s.apply(it->second).normalized();

  Conjunction behavior = s.apply(nc.behavior);
  std::vector<std::string> open;
  for (const auto& v : free_variables(behavior)) {
    if (st.shared_vars->count(v)) open.push_back(v);
  }

  CalculusOptions opts;
  opts.depth_limit = st.query.depth_limit;

  auto check_one = [&](const Substitution& bound) -> std::optional<Judgment> {
    Conjunction b = bound.apply(behavior);
    Judgment j = permissible(st.kb, store, agent, b, context, st.query.closure, opts);
    if (j.verdict == Verdict::Permissible) return j;
    st.norm_check_failed = true;
    if (!st.failing_judgment) st.failing_judgment = j;
    return std::nullopt;
  };

  if (open.empty()) {
    if (auto j = check_one(Substitution{})) {
      st.passing_judgment = j;
      st.trace.push_back("norm check passed for " + to_string(to_sexpr(behavior)));
      return prove_preconditions(m, idx + 1, s, st);
    }
    return false;
  }

  // Method-shared variables left open: range them over the existential pool
  // and hand each permissible witness to the rest of the proof.
  if (st.query.existential_pool.empty()) {
    st.norm_check_failed = true;
    if (!st.failing_judgment) {
      Judgment j;
      j.verdict = Verdict::Impermissible;
      j.trace.push_back("no candidates supplied for open variable " + open[0]);
      st.failing_judgment = j;
    }
    return false;
  }
  std::vector<std::size_t> pick(open.size(), 0);
  const std::size_t n = st.query.existential_pool.size();
  while (true) {
    Substitution bound;
    for (std::size_t i = 0; i < open.size(); ++i) {
      bound.bind(open[i], st.query.existential_pool[pick[i]]);
    }
    if (auto j = check_one(bound)) {
      Substitution s2 = s;
      for (std::size_t i = 0; i < open.size(); ++i) {
        s2.bind(open[i], st.query.existential_pool[pick[i]]);
      }
      st.passing_judgment = j;
      st.trace.push_back("norm check passed for " +
                         to_string(to_sexpr(bound.apply(behavior))));
      if (prove_preconditions(m, idx + 1, s2, st)) return true;
    }
    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < n) break;
      pick[i] = 0;
    }
    if (i == pick.size()) return false;
  }
}

bool prove_preconditions(const Method& m, std::size_t idx, const Substitution& s,
                         AttemptState& st) {
  if (idx == m.preconditions.size()) {
    st.solution = s;
    return true;
  }
  const Precondition& pre = m.preconditions[idx];

  if (const auto* d = std::get_if<DiscoursePre>(&pre)) {
    Term dv = s.walk(Term::variable(d->discourse_var));
    Substitution s2 = s;
    if (dv.is_variable()) {
      s2.bind(dv.name(), st.query.discourse_id);
    } else if (!(dv == st.query.discourse_id)) {
      st.lookup_failed = true;
      return false;
    }
    (*st.facts_bindings)[d->facts_var] = st.query.discourse;
    return prove_preconditions(m, idx + 1, s2, st);
  }

  if (const auto* g = std::get_if<GoalPre>(&pre)) {
    if (g->goal.is_naf()) {
      Conjunction body = s.apply(g->goal.naf_body());
      if (discourse_satisfies(body.literals, 0, Substitution{},
                              st.query.discourse)) {
        st.lookup_failed = true;
        return false;
      }
      return prove_preconditions(m, idx + 1, s, st);
    }
    return match_discourse(m, idx, s.apply(g->goal.literal()), s, st);
  }

  if (const auto* lk = std::get_if<LookupPre>(&pre)) {
    const std::string agent = resolve_agent(s, lk->agent);
    Literal want = lk->pattern.instantiate(s);
    SolveOptions opts;
    opts.depth_limit = st.query.depth_limit;
    SolveResult r = st.kb.solve(std::vector<Goal>{Goal::positive(want)}, agent, opts);
    if (r.solutions.empty() && r.depth_exceeded) {
      throw IndeterminateError("knowledge lookup " + to_string(to_sexpr(want)) +
                               " ran out of proof depth");
    }
    if (r.solutions.empty()) {
      st.lookup_failed = true;
      return false;
    }
    for (const auto& sol : r.solutions) {
      Substitution s2 = s;
      bool ok = true;
      for (const auto& [var, val] : sol) {
        Term cur = s2.walk(Term::variable(var));
        if (cur.is_variable()) {
          s2.bind(cur.name(), val);
        } else if (!(cur == val)) {
          ok = false;
          break;
        }
      }
      if (ok && prove_preconditions(m, idx + 1, s2, st)) return true;
    }
    return false;
  }

  return prove_norm_check(m, idx, std::get<NormCheckPre>(pre), s, st);
}

ActionStep instantiate_step(const ActionStep& step, const Substitution& s) {
  ActionStep out;
  out.verb = step.verb;
  for (const auto& arg : step.args) {
    if (const auto* t = std::get_if<Term>(&arg)) {
      out.args.emplace_back(s.walk(*t));
    } else {
      Literal lit = std::get<LiteralPattern>(arg).instantiate(s);
      out.args.emplace_back(
          LiteralPattern{Term::constant(lit.predicate), std::move(lit.args)});
    }
  }
  if (!out.is_ground()) {
    throw PlanError("plan step " + to_string(out) +
                    " still has unbound variables after a full proof");
  }
  return out;
}

}  // namespace

PlanOutcome Planner::attempt_action(const KnowledgeBase& kb,
                                    const std::map<std::string, NormStore>& stores,
                                    const PlanQuery& query) const {
  PlanOutcome out;
  bool matched = false;
  bool norm_check_failed = false;
  bool lookup_failed = false;
  std::optional<Judgment> failing;
  int attempt = 0;

  for (const auto& method : methods_) {
    if (method.action_pattern.predicate != query.action.predicate ||
        method.action_pattern.args.size() != query.action.args.size()) {
      continue;
    }
    Method renamed = rename_method(method, "~p" + std::to_string(++attempt));
    auto s0 = unify(query.action, renamed.action_pattern, Substitution{});
    if (!s0) continue;
    matched = true;

    std::set<std::string> shared = shared_vars_outside_norm_check(renamed);
    std::map<std::string, Conjunction> facts_bindings;
    AttemptState st{kb, stores, query, &shared, &facts_bindings,
                    false, false, {}, {}, {}, {}};
    st.trace.push_back("trying method " + method.name);

    bool found = prove_preconditions(renamed, 0, *s0, st);
    out.trace.insert(out.trace.end(), st.trace.begin(), st.trace.end());

    if (found) {
      out.kind = PlanOutcomeKind::Executed;
      out.norm_judgment = st.passing_judgment;
      for (const auto& step : renamed.actions) {
        out.steps.push_back(instantiate_step(step, *st.solution));
      }
      out.trace.push_back("executed " + method.name);

      if (query.recheck_guard) {
        out.guard_rechecked = true;
        for (const auto& pre : renamed.preconditions) {
          const auto* nc = std::get_if<NormCheckPre>(&pre);
          if (!nc) continue;
          const std::string agent = resolve_agent(*st.solution, nc->agent);
          Conjunction b = st.solution->apply(nc->behavior);
          Conjunction ctx = st.solution->apply(query.discourse).normalized();
          CalculusOptions opts;
          opts.depth_limit = query.depth_limit;
          Judgment j = permissible(kb, store_for(st, agent), agent, b, ctx,
                                   query.closure, opts);
          if (j.verdict != Verdict::Permissible) {
            out.guard_violation = true;
            out.trace.push_back("guard recheck FAILED for " +
                                to_string(to_sexpr(b)));
          }
        }
      }
      return out;
    }

    norm_check_failed = norm_check_failed || st.norm_check_failed;
    lookup_failed = lookup_failed || st.lookup_failed;
    if (!failing && st.failing_judgment) failing = st.failing_judgment;
  }

  if (!matched) {
    out.kind = PlanOutcomeKind::NoMethod;
    out.trace.push_back("no method for " + query.action.predicate + "/" +
                        std::to_string(query.action.args.size()));
    return out;
  }
  if (norm_check_failed) {
    out.kind = PlanOutcomeKind::Refused;
    out.norm_judgment = failing;
    out.trace.push_back("refused: norm check failed");
    return out;
  }
  out.kind = PlanOutcomeKind::NoBinding;
  out.trace.push_back(lookup_failed ? "no binding: a knowledge lookup failed"
                                    : "no binding: preconditions unsatisfied");
  return out;
}

}  // namespace normguard
