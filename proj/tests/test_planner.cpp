#include "doctest.h"
#include "normguard/planner.hpp"

#include <algorithm>

using namespace normguard;

namespace {

KnowledgeBase agent_kb() {
  KnowledgeBase kb;
  kb.load_text(R"((mt T)
(fact (isa Juice Drink))
(fact (isa Soda Drink))
(fact (isa Pizza Food))
(mt Karli)
(genlMt Karli T)
(fact (likesType Karli Juice))
)");
  return kb;
}

Conjunction conj(const std::string& text) {
  return conjunction_from_sexpr(parse_sexpr(text));
}

Literal lit(const std::string& text) {
  return conj(text).literals.front();
}

NormFrame frame(const std::string& id, DeonticEvaluation e, const std::string& behavior) {
  NormFrame f;
  f.id = id;
  f.owner = "Karli";
  f.behavior = conj(behavior);
  f.context = conj("(and)");
  f.evaluation = e;
  return f;
}

const char* kShareJuiceWithMom =
    "(and (isa ?share SharingPref) (prefOwner ?share Karli) (object ?share Juice)"
    " (polarity ?share likesType) (hearer ?share Mom))";

std::map<std::string, NormStore> stores_with(const NormFrame& f) {
  std::map<std::string, NormStore> stores;
  auto [it, inserted] = stores.emplace("Karli", NormStore("Karli"));
  it->second.add_testimony(f);
  return stores;
}

Planner default_planner() {
  Planner p;
  p.register_method(parse_method(default_methods_text()));
  return p;
}

PlanQuery ask_about(const std::string& object, const std::string& polarity = "likesType") {
  PlanQuery q;
  q.action = lit("(respondToUser ?d ?dl ?obj ?owner ?asker)");
  q.discourse = conj("(and (askingPreference " + polarity + " " + object + " Karli Mom))");
  return q;
}

bool trace_mentions(const PlanOutcome& o, const std::string& needle) {
  return std::any_of(o.trace.begin(), o.trace.end(), [&](const std::string& line) {
    return line.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("the bundled method round-trips through its text form") {
  Method m = parse_method(default_methods_text());
  CHECK(m.name == "respondToUser/5");
  CHECK(m.action_pattern.predicate == "respondToUser");
  CHECK(m.action_pattern.args.size() == 5);
  REQUIRE(m.preconditions.size() == 4);
  CHECK(std::holds_alternative<DiscoursePre>(m.preconditions[0]));
  CHECK(std::holds_alternative<GoalPre>(m.preconditions[1]));
  CHECK(std::holds_alternative<LookupPre>(m.preconditions[2]));
  CHECK(std::holds_alternative<NormCheckPre>(m.preconditions[3]));
  REQUIRE(m.actions.size() == 1);
  CHECK(m.actions[0].verb == "respond");
  CHECK_FALSE(m.order.has_value());

  Method again = parse_method(to_string(m));
  CHECK(again.name == m.name);
  CHECK(again.action_pattern == m.action_pattern);
  CHECK(again.preconditions == m.preconditions);
  CHECK(again.actions == m.actions);
}

TEST_CASE("malformed method text is rejected with positions") {
  CHECK_THROWS_AS(parse_method("(foo)"), ParseError);
  CHECK_THROWS_AS(parse_method("(preconditionForMethod (factsInDiscourse ?d ?f) "
                               "(methodForAction (go ?d) (actionSequence (TheList))))"),
                  ParseError);  // preconditions must be an (and ...) form
  CHECK_THROWS_AS(parse_method("(preconditionForMethod (and) "
                               "(methodForAction (go ?d) (TheList (respond ?d))))"),
                  ParseError);  // missing actionSequence wrapper
  CHECK_THROWS_AS(parse_method("(preconditionForMethod (and) "
                               "(methodForAction (go ?d) (actionSequence (TheList (?v ?d)))))"),
                  ParseError);  // step verb must be fixed
  CHECK_THROWS_AS(parse_method("(preconditionForMethod (and) "
                               "(methodForAction (go ?d) (actionSequence (TheList (stop ?d)))) "
                               "(order two))"),
                  ParseError);  // order must be an integer
  CHECK_THROWS_AS(parse_method("(preconditionForMethod (and (factsInDiscourse d ?f)) "
                               "(methodForAction (go ?d) (actionSequence (TheList (stop ?d)))))"),
                  ParseError);  // factsInDiscourse takes two variables
}

TEST_CASE("registration enforces the guard-rail shape") {
  // The norm check's context variable must come from an earlier
  // factsInDiscourse binding.
  Planner p;
  CHECK_THROWS_AS(
      p.register_method(parse_method(
          "(preconditionForMethod (and (ist-Information ?a (permissible (and (p ?x)) ?facts))) "
          "(methodForAction (go ?d ?a) (actionSequence (TheList (stop ?d)))))")),
      PlanError);

  // At most one norm check per method.
  CHECK_THROWS_AS(
      p.register_method(parse_method(
          "(preconditionForMethod (and (factsInDiscourse ?d ?f) "
          "(ist-Information ?a (permissible (and (p ?x)) ?f)) "
          "(ist-Information ?a (permissible (and (q ?x)) ?f))) "
          "(methodForAction (go ?d ?a) (actionSequence (TheList (stop ?d)))))")),
      PlanError);

  // A second method for the same action head needs explicit order on both.
  Planner q;
  q.register_method(parse_method(
      "(preconditionForMethod (and (factsInDiscourse ?d ?f)) "
      "(methodForAction (go ?d) (actionSequence (TheList (stop ?d)))))"));
  CHECK_THROWS_AS(
      q.register_method(parse_method(
          "(preconditionForMethod (and (factsInDiscourse ?d ?f)) "
          "(methodForAction (go ?d) (actionSequence (TheList (halt ?d)))))")),
      PlanError);
}

TEST_CASE("methods for one action head run in explicit order") {
  Planner p;
  p.register_method(parse_method(
      "(preconditionForMethod (and (factsInDiscourse ?d ?f)) "
      "(methodForAction (go ?d) (actionSequence (TheList (late ?d)))) (order 2))"));
  p.register_method(parse_method(
      "(preconditionForMethod (and (factsInDiscourse ?d ?f)) "
      "(methodForAction (go ?d) (actionSequence (TheList (early ?d)))) (order 1))"));
  REQUIRE(p.methods().size() == 2);
  CHECK(p.methods()[0].actions[0].verb == "early");
  CHECK(p.methods()[1].actions[0].verb == "late");

  PlanQuery q;
  q.action = lit("(go ?d)");
  q.discourse = conj("(and)");
  PlanOutcome out = p.attempt_action(agent_kb(), {}, q);
  REQUIRE(out.kind == PlanOutcomeKind::Executed);
  CHECK(out.steps[0].verb == "early");
}

TEST_CASE("a licensed question is answered with a ground step") {
  KnowledgeBase kb = agent_kb();
  Planner p = default_planner();
  auto stores = stores_with(frame("n1", DeonticEvaluation::Optional, kShareJuiceWithMom));

  PlanOutcome out = p.attempt_action(kb, stores, ask_about("Juice"));
  REQUIRE(out.kind == PlanOutcomeKind::Executed);
  REQUIRE(out.steps.size() == 1);
  CHECK(out.steps[0].verb == "respond");
  CHECK(out.steps[0].is_ground());
  CHECK(to_string(out.steps[0]) == "(respond d0 (likesType Karli Juice))");
  REQUIRE(out.norm_judgment.has_value());
  CHECK(out.norm_judgment->verdict == Verdict::Permissible);
  CHECK_FALSE(out.guard_rechecked);
  CHECK(trace_mentions(out, "trying method respondToUser/5"));
  CHECK(trace_mentions(out, "executed respondToUser/5"));
}

TEST_CASE("an unlicensed question is refused with the failing judgment") {
  KnowledgeBase kb = agent_kb();
  Planner p = default_planner();
  std::map<std::string, NormStore> stores;
  stores.emplace("Karli", NormStore("Karli"));

  PlanOutcome out = p.attempt_action(kb, stores, ask_about("Juice"));
  CHECK(out.kind == PlanOutcomeKind::Refused);
  REQUIRE(out.norm_judgment.has_value());
  CHECK(out.norm_judgment->verdict == Verdict::Impermissible);
  CHECK(out.norm_judgment->by_closure());
  CHECK(trace_mentions(out, "refused: norm check failed"));

  // The same silence licenses the answer when unregulated behavior is open.
  PlanQuery open = ask_about("Juice");
  open.closure = ClosureAssumption::Permissive;
  CHECK(p.attempt_action(kb, stores, open).kind == PlanOutcomeKind::Executed);
}

TEST_CASE("unanswerable and unrecognized actions are told apart") {
  KnowledgeBase kb = agent_kb();
  Planner p = default_planner();
  auto stores = stores_with(frame("n1", DeonticEvaluation::Optional, kShareJuiceWithMom));

  PlanQuery no_method;
  no_method.action = lit("(fly d0)");
  no_method.discourse = conj("(and)");
  PlanOutcome a = p.attempt_action(kb, stores, no_method);
  CHECK(a.kind == PlanOutcomeKind::NoMethod);
  CHECK(trace_mentions(a, "no method for fly/1"));

  // No question in the discourse: the goal precondition has nothing to match.
  PlanQuery silent = ask_about("Juice");
  silent.discourse = conj("(and)");
  PlanOutcome b = p.attempt_action(kb, stores, silent);
  CHECK(b.kind == PlanOutcomeKind::NoBinding);

  // A question about an unknown preference fails at the knowledge lookup,
  // before the guard, so it is NoBinding rather than Refused.
  PlanOutcome c = p.attempt_action(kb, stores, ask_about("Pizza"));
  CHECK(c.kind == PlanOutcomeKind::NoBinding);
  CHECK(trace_mentions(c, "no binding: a knowledge lookup failed"));
}

TEST_CASE("the guard recheck re-proves the executed behavior") {
  KnowledgeBase kb = agent_kb();
  Planner p = default_planner();
  auto stores = stores_with(frame("n1", DeonticEvaluation::Optional, kShareJuiceWithMom));

  PlanQuery q = ask_about("Juice");
  q.recheck_guard = true;
  PlanOutcome out = p.attempt_action(kb, stores, q);
  REQUIRE(out.kind == PlanOutcomeKind::Executed);
  CHECK(out.guard_rechecked);
  CHECK_FALSE(out.guard_violation);
}

TEST_CASE("open norm-check variables range over the existential pool") {
  KnowledgeBase kb = agent_kb();
  Planner p;
  // ?obj is shared with the action step and the later lookup but is unbound
  // when the guard runs, so the guard must propose witnesses.
  p.register_method(parse_method(
      "(preconditionForMethod (and "
      "(factsInDiscourse ?d ?facts) "
      "(ist-Information ?owner (permissible (and (isa ?share SharingPref) "
      "(prefOwner ?share ?owner) (object ?share ?obj)) ?facts)) "
      "(ist-Information ?owner (likesType ?owner ?obj))) "
      "(methodForAction (volunteer ?d ?owner) "
      "(actionSequence (TheList (respond ?d (likesType ?owner ?obj))))))"));

  auto stores = stores_with(frame(
      "drinks", DeonticEvaluation::Optional,
      "(and (isa ?share SharingPref) (prefOwner ?share Karli) (object ?share ?o)"
      " (isa ?o Drink))"));

  PlanQuery q;
  q.action = lit("(volunteer ?d Karli)");
  q.discourse = conj("(and)");

  SUBCASE("no pool, open variable: the guard refuses") {
    PlanOutcome out = p.attempt_action(kb, stores, q);
    CHECK(out.kind == PlanOutcomeKind::Refused);
    REQUIRE(out.norm_judgment.has_value());
    CHECK(trace_mentions(out, "refused: norm check failed"));
  }

  SUBCASE("later preconditions reject witnesses until one fits") {
    // Soda passes the guard but fails the lookup (Karli only likes juice);
    // the proof must backtrack into the next permissible witness.
    q.existential_pool = {Term::constant("Pizza"), Term::constant("Soda"),
                          Term::constant("Juice")};
    PlanOutcome out = p.attempt_action(kb, stores, q);
    REQUIRE(out.kind == PlanOutcomeKind::Executed);
    CHECK(to_string(out.steps[0]) == "(respond d0 (likesType Karli Juice))");
  }

  SUBCASE("a pool with no permissible member refuses") {
    q.existential_pool = {Term::constant("Pizza")};
    PlanOutcome out = p.attempt_action(kb, stores, q);
    CHECK(out.kind == PlanOutcomeKind::Refused);
  }
}

TEST_CASE("negative discourse preconditions veto a method") {
  Planner p;
  p.register_method(parse_method(
      "(preconditionForMethod (and (factsInDiscourse ?d ?f) "
      "(naf (muted ?d))) "
      "(methodForAction (chime ?d) (actionSequence (TheList (ding ?d)))))"));

  PlanQuery q;
  q.action = lit("(chime ?d)");
  q.discourse = conj("(and)");
  CHECK(p.attempt_action(agent_kb(), {}, q).kind == PlanOutcomeKind::Executed);

  q.discourse = conj("(and (muted d0))");
  CHECK(p.attempt_action(agent_kb(), {}, q).kind == PlanOutcomeKind::NoBinding);
}

TEST_CASE("a proof that leaves a step variable unbound is an error") {
  Planner p;
  p.register_method(parse_method(
      "(preconditionForMethod (and (factsInDiscourse ?d ?f)) "
      "(methodForAction (ping ?d) (actionSequence (TheList (respond ?d ?mystery)))))"));
  PlanQuery q;
  q.action = lit("(ping ?d)");
  q.discourse = conj("(and)");
  CHECK_THROWS_AS(p.attempt_action(agent_kb(), {}, q), PlanError);
}

TEST_CASE("new testimony flips the next attempt without planner state") {
  KnowledgeBase kb = agent_kb();
  Planner p = default_planner();
  std::map<std::string, NormStore> stores;
  auto [it, inserted] = stores.emplace("Karli", NormStore("Karli"));

  CHECK(p.attempt_action(kb, stores, ask_about("Juice")).kind ==
        PlanOutcomeKind::Refused);

  it->second.add_testimony(frame("n1", DeonticEvaluation::Optional, kShareJuiceWithMom));
  CHECK(p.attempt_action(kb, stores, ask_about("Juice")).kind ==
        PlanOutcomeKind::Executed);

  it->second.add_testimony(frame(
      "n2", DeonticEvaluation::Impermissible,
      "(and (isa ?share SharingPref) (prefOwner ?share Karli) (object ?share ?o)"
      " (isa ?o Drink))"));
  PlanOutcome out = p.attempt_action(kb, stores, ask_about("Juice"));
  CHECK(out.kind == PlanOutcomeKind::Refused);
  REQUIRE(out.norm_judgment.has_value());
  CHECK(out.norm_judgment->verdict == Verdict::Impermissible);
}
