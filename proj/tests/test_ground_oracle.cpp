#include "doctest.h"
#include "ground_oracle.hpp"

#include <algorithm>

using namespace normguard;
using namespace normguard::testsupport;

namespace {

Conjunction conj(const std::string& text) {
  return conjunction_from_sexpr(parse_sexpr(text));
}

Literal lit(const std::string& text) {
  return conj(text).literals.front();
}

/// Transitive closure program; recursion is fine for the bottom-up oracle.
GroundProgram paths_program() {
  GroundProgram p;
  p.predicates = {"edge", "path"};
  p.arities = {2, 2};
  p.constants = {Term::constant("a"), Term::constant("b"), Term::constant("c")};
  p.facts = {lit("(edge a b)"), lit("(edge b c)")};
  p.rules = {
      HornClause{lit("(path ?x ?y)"), {Goal::positive(lit("(edge ?x ?y)"))}},
      HornClause{lit("(path ?x ?y)"),
                 {Goal::positive(lit("(edge ?x ?z)")),
                  Goal::positive(lit("(path ?z ?y)"))}},
  };
  return p;
}

Literal ground_instance(std::mt19937& rng, const GroundProgram& p) {
  std::uniform_int_distribution<std::size_t> pred(0, p.predicates.size() - 1);
  std::uniform_int_distribution<std::size_t> con(0, p.constants.size() - 1);
  const std::size_t pi = pred(rng);
  Literal l;
  l.predicate = p.predicates[pi];
  for (std::size_t a = 0; a < p.arities[pi]; ++a) l.args.push_back(p.constants[con(rng)]);
  return l;
}

long long herbrand_size(const GroundProgram& p) {
  long long total = 0;
  for (std::size_t i = 0; i < p.predicates.size(); ++i) {
    long long cells = 1;
    for (std::size_t a = 0; a < p.arities[i]; ++a)
      cells *= static_cast<long long>(p.constants.size());
    total += cells;
  }
  return total;
}

NormFrame random_frame(std::mt19937& rng, const GroundProgram& p, int index) {
  std::uniform_int_distribution<int> d(0, 2);
  NormFrame f;
  f.id = "f" + std::to_string(index);
  f.owner = "M";
  f.behavior = random_conjunction(rng, p, 2, 2);
  f.context = d(rng) == 0 ? random_conjunction(rng, p, 1, 1) : Conjunction{};
  switch (d(rng)) {
    case 0: f.evaluation = DeonticEvaluation::Obligatory; break;
    case 1: f.evaluation = DeonticEvaluation::Optional; break;
    default: f.evaluation = DeonticEvaluation::Impermissible; break;
  }
  return f;
}

}  // namespace

TEST_CASE("the bottom-up oracle saturates recursive rules") {
  GroundProgram p = paths_program();
  std::set<Literal> model = fixpoint(p);

  CHECK(model.count(lit("(edge a b)")) == 1);
  CHECK(model.count(lit("(path a b)")) == 1);
  CHECK(model.count(lit("(path b c)")) == 1);
  CHECK(model.count(lit("(path a c)")) == 1);  // via the recursive rule
  CHECK(model.count(lit("(path c a)")) == 0);
  CHECK(model.size() == 5);

  // Extra facts join the universe.
  std::set<Literal> wider = fixpoint(p, {lit("(edge c d)")});
  CHECK(wider.count(lit("(path a d)")) == 1);
}

TEST_CASE("oracle entailment freezes the premise and searches the conclusion") {
  GroundProgram p = paths_program();

  CHECK(oracle_entails(p, conj("(and (edge a b))"), conj("(and (path a b))")));
  CHECK_FALSE(oracle_entails(p, conj("(and (edge a b))"), conj("(and (path b a))")));

  // Premise variables read universally: an edge into fresh d from some
  // unnamed endpoint does not prove the edge comes from a.
  CHECK_FALSE(oracle_entails(p, conj("(and (edge ?x d))"), conj("(and (edge a d))")));
  CHECK(oracle_entails(p, conj("(and (edge ?x d))"), conj("(and (path ?x d))")));

  // Conclusion variables are existential, even when names overlap.
  CHECK(oracle_entails(p, conj("(and (edge a b))"), conj("(and (path ?x ?y))")));
  CHECK(oracle_entails(p, conj("(and (edge a b))"), conj("(and)")));
}

TEST_CASE("backward chaining agrees with the saturated model on random programs") {
  int ground_checks = 0;
  int query_checks = 0;
  for (int trial = 0; trial < 120; ++trial) {
    CAPTURE(trial);
    std::mt19937 rng(900 + static_cast<unsigned>(trial));
    GroundProgram p = random_program(rng);
    REQUIRE(herbrand_size(p) <= 10000);
    KnowledgeBase kb = to_kb(p);
    std::set<Literal> model = fixpoint(p);

    for (int probe = 0; probe < 25; ++probe) {
      Literal l = ground_instance(rng, p);
      SolveResult r = kb.solve(std::vector<Goal>{Goal::positive(l)}, "M");
      REQUIRE_FALSE(r.depth_exceeded);
      CHECK(r.succeeded() == (model.count(l) == 1));
      ++ground_checks;
    }

    // All-variable queries must enumerate exactly the model's rows.
    for (std::size_t pi = 0; pi < p.predicates.size(); ++pi) {
      Literal q;
      q.predicate = p.predicates[pi];
      for (std::size_t a = 0; a < p.arities[pi]; ++a)
        q.args.push_back(Term::variable("?v" + std::to_string(a)));
      SolveResult r = kb.solve(std::vector<Goal>{Goal::positive(q)}, "M");
      REQUIRE_FALSE(r.depth_exceeded);

      std::set<Literal> got;
      for (const Substitution& s : r.solutions) got.insert(s.apply(q));
      std::set<Literal> want;
      for (const Literal& m : model) {
        if (m.predicate == q.predicate) want.insert(m);
      }
      CHECK(got == want);
      ++query_checks;
    }
  }
  CHECK(ground_checks == 120 * 25);
  CHECK(query_checks > 0);
}

TEST_CASE("engine entailment agrees with the ground oracle on random conjunction pairs") {
  int agreements = 0;
  for (int trial = 0; trial < 150; ++trial) {
    CAPTURE(trial);
    std::mt19937 rng(4200 + static_cast<unsigned>(trial));
    GroundProgram p = random_program(rng);
    KnowledgeBase kb = to_kb(p);

    for (int pair = 0; pair < 6; ++pair) {
      Conjunction c1 = random_conjunction(rng, p, 3, 2);
      Conjunction c2 = random_conjunction(rng, p, 2, 2);
      CAPTURE(to_string(c1));
      CAPTURE(to_string(c2));
      Trilean engine = entails(kb, "M", c1, c2);
      REQUIRE(engine != Trilean::Indeterminate);  // stratified programs terminate
      bool oracle = oracle_entails(p, c1, c2);
      CHECK((engine == Trilean::True) == oracle);
      ++agreements;
    }
  }
  CHECK(agreements == 150 * 6);
}

TEST_CASE("the calculus agrees with a literal reading of its rules on random stores") {
  int verdicts = 0;
  for (int trial = 0; trial < 120; ++trial) {
    CAPTURE(trial);
    std::mt19937 rng(7100 + static_cast<unsigned>(trial));
    GroundProgram p = random_program(rng);
    KnowledgeBase kb = to_kb(p);

    std::uniform_int_distribution<int> frames(0, 4);
    NormStore store("M");
    const int n = frames(rng);
    for (int k = 0; k < n; ++k) store.add_testimony(random_frame(rng, p, k));

    for (int probe = 0; probe < 4; ++probe) {
      Conjunction b = random_conjunction(rng, p, 2, 1);
      Conjunction c = random_conjunction(rng, p, 1, 0);
      CAPTURE(to_string(b));
      CAPTURE(to_string(c));
      for (ClosureAssumption closure :
           {ClosureAssumption::Prohibitive, ClosureAssumption::Permissive}) {
        Judgment j = permissible(kb, store, "M", b, c, closure);
        bool oracle = oracle_permissible(p, store, b, c, closure);
        CHECK((j.verdict == Verdict::Permissible) == oracle);
        ++verdicts;
      }
    }
  }
  CHECK(verdicts == 120 * 4 * 2);
}
