#include "doctest.h"
#include "normguard/ast.hpp"

using namespace normguard;

TEST_CASE("s-expression parser round-trips atoms and lists") {
  const std::string text = "(and (isa ?x Drink) (likesType Plato ?x))";
  SExpr e = parse_sexpr(text);
  CHECK(to_string(e) == text);

  CHECK_THROWS_AS(parse_sexpr("()"), ParseError);
  CHECK(to_string(parse_sexpr("  atom  ")) == "atom");
  CHECK(to_string(parse_sexpr("(a\n  (b c)\td)")) == "(a (b c) d)");
}

TEST_CASE("s-expression parser reports malformed input with offsets") {
  CHECK_THROWS_AS(parse_sexpr("(a (b)"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("a) b"), ParseError);
  CHECK_THROWS_AS(parse_sexpr(""), ParseError);
  CHECK_THROWS_AS(parse_sexpr("(a) trailing"), ParseError);
  CHECK(parse_sexprs("(a) (b c)").size() == 2);
}

TEST_CASE("terms split on the variable sigil") {
  CHECK(Term::from_symbol("?x").is_variable());
  CHECK(Term::from_symbol("Plato").is_constant());
  CHECK(Term::variable("?x").name() == "?x");
  CHECK(to_string(Term::constant("Juice")) == "Juice");
}

TEST_CASE("reserved constants are rejected from user sources") {
  CHECK_THROWS_AS(term_from_sexpr(parse_sexpr("$frz0")), ParseError);
  CHECK_NOTHROW(term_from_sexpr(parse_sexpr("$frz0"), /*allow_reserved=*/true));
  CHECK_THROWS_AS(literal_from_sexpr(parse_sexpr("(isa $frz0 Drink)")), ParseError);
}

TEST_CASE("conjunctions accept (and ...) or a bare literal and normalize") {
  Conjunction c = conjunction_from_sexpr(
      parse_sexpr("(and (isa ?x Drink) (isa ?x Drink) (likesType Plato ?x))"));
  CHECK(c.literals.size() == 3);
  CHECK(c.normalized().literals.size() == 2);

  Conjunction bare = conjunction_from_sexpr(parse_sexpr("(isa Juice Drink)"));
  CHECK(bare.literals.size() == 1);

  CHECK(conjunction_from_sexpr(parse_sexpr("(and)")).is_top());
  CHECK(Conjunction::top().is_top());
}

TEST_CASE("free variables come back in first-occurrence order") {
  Conjunction c = conjunction_from_sexpr(
      parse_sexpr("(and (object ?s ?o) (isa ?o Drink) (hearer ?s ?h))"));
  CHECK(free_variables(c) == std::vector<std::string>{"?s", "?o", "?h"});
}

TEST_CASE("goals distinguish positive literals from naf blocks") {
  Goal g = goal_from_sexpr(parse_sexpr("(naf (isa ?x Drink))"));
  CHECK(g.is_naf());
  CHECK(g.naf_body().literals.size() == 1);
  Goal pos = goal_from_sexpr(parse_sexpr("(isa ?x Drink)"));
  CHECK_FALSE(pos.is_naf());
  CHECK(pos.literal().predicate == "isa");
}

TEST_CASE("substitution walks chains and projects") {
  Substitution s;
  s.bind("?a", Term::variable("?b"));
  s.bind("?b", Term::constant("Juice"));
  CHECK(s.walk(Term::variable("?a")) == Term::constant("Juice"));

  Literal l{"object", {Term::variable("?s"), Term::variable("?a")}};
  CHECK(to_string(s.apply(l)) == "(object ?s Juice)");

  Substitution r = s.resolved();
  CHECK(r.lookup("?a") == Term::constant("Juice"));

  Substitution p = s.project({"?a"});
  CHECK(p.size() == 1);
  CHECK(p.lookup("?b") == std::nullopt);
}

TEST_CASE("unification is sound and arity-strict") {
  Literal a{"isa", {Term::variable("?x"), Term::constant("Drink")}};
  Literal b{"isa", {Term::constant("Juice"), Term::constant("Drink")}};
  auto s = unify(a, b, {});
  REQUIRE(s.has_value());
  CHECK(s->walk(Term::variable("?x")) == Term::constant("Juice"));

  Literal c{"isa", {Term::constant("Juice"), Term::constant("Food")}};
  CHECK_FALSE(unify(a, c, {}).has_value());

  Literal wrong_arity{"isa", {Term::constant("Juice")}};
  CHECK_THROWS_AS(unify(a, wrong_arity, {}), ArityError);

  // Repeated variables must corefer.
  Literal twice{"edge", {Term::variable("?x"), Term::variable("?x")}};
  Literal uv{"edge", {Term::constant("u"), Term::constant("v")}};
  Literal uu{"edge", {Term::constant("u"), Term::constant("u")}};
  CHECK_FALSE(unify(twice, uv, {}).has_value());
  CHECK(unify(twice, uu, {}).has_value());
}
