#include "doctest.h"
#include "normguard/norms.hpp"

using namespace normguard;

namespace {

KnowledgeBase taxonomy_kb() {
  KnowledgeBase kb;
  kb.load_text(R"((mt T)
(fact (isa Juice Drink))
(fact (isa Soda Drink))
(fact (isa Pizza Food))
)");
  return kb;
}

Conjunction conj(const std::string& text) {
  return conjunction_from_sexpr(parse_sexpr(text));
}

NormFrame frame(const std::string& id, DeonticEvaluation e, const std::string& behavior,
                const std::string& context = "(and)") {
  NormFrame f;
  f.id = id;
  f.owner = "Plato";
  f.behavior = conj(behavior);
  f.context = conj(context);
  f.evaluation = e;
  return f;
}

const char* kJuiceScope = "(and (isa ?s Sharing) (object ?s Juice))";
const char* kDrinkScope = "(and (isa ?s Sharing) (object ?s ?o) (isa ?o Drink))";
const char* kAllScope = "(and (isa ?s Sharing))";

}  // namespace

TEST_CASE("evaluations split into permissions and prohibitions") {
  CHECK(norm_class(DeonticEvaluation::Obligatory) == NormClass::Permission);
  CHECK(norm_class(DeonticEvaluation::Optional) == NormClass::Permission);
  CHECK(norm_class(DeonticEvaluation::Impermissible) == NormClass::Prohibition);
  CHECK(evaluation_from_string("Optional") == DeonticEvaluation::Optional);
  CHECK_FALSE(evaluation_from_string("Sometimes").has_value());
}

TEST_CASE("the store stamps strictly increasing timestamps") {
  NormStore store("Plato");
  const NormFrame& a = store.add_testimony(frame("a", DeonticEvaluation::Optional, kJuiceScope));
  const NormFrame& b = store.add_testimony(frame("b", DeonticEvaluation::Impermissible, kDrinkScope));
  CHECK(a.timestamp < b.timestamp);
  CHECK(norm_prior_to_norm(a, b));
  CHECK_FALSE(norm_prior_to_norm(b, a));
  CHECK_FALSE(norm_prior_to_norm(a, a));
  CHECK(store.find("a") != nullptr);
  CHECK(store.find("zzz") == nullptr);

  NormFrame stale = frame("c", DeonticEvaluation::Optional, kJuiceScope);
  stale.timestamp = 1;  // ignored on input
  CHECK(store.add_testimony(stale).timestamp > b.timestamp);
}

TEST_CASE("the store rejects duplicate ids and reserved symbols") {
  NormStore store("Plato");
  store.add_testimony(frame("a", DeonticEvaluation::Optional, kJuiceScope));
  CHECK_THROWS_AS(store.add_testimony(frame("a", DeonticEvaluation::Optional, kAllScope)),
                  StoreError);
  CHECK_THROWS_AS(
      store.add_testimony(frame("r", DeonticEvaluation::Optional,
                                "(and (object ?s $frz0))")),
      ParseError);  // reserved symbols never parse from user text
}

TEST_CASE("activity tests the context against the situation") {
  KnowledgeBase kb = taxonomy_kb();
  NormFrame gated = frame("g", DeonticEvaluation::Optional, kJuiceScope,
                          "(and (inConversation Plato ?someone))");
  CHECK(active_in(kb, "T", gated, conj("(inConversation Plato Socrates)")) ==
        Trilean::True);
  CHECK(active_in(kb, "T", gated, Conjunction::top()) == Trilean::False);

  NormFrame always = frame("u", DeonticEvaluation::Optional, kJuiceScope);
  CHECK(active_in(kb, "T", always, Conjunction::top()) == Trilean::True);
}

TEST_CASE("application grounds test the act against the behavior") {
  KnowledgeBase kb = taxonomy_kb();
  const NormFrame drinks = frame("d", DeonticEvaluation::Optional, kDrinkScope);
  CHECK(on_application_grounds(
            kb, "T", conj("(and (isa ?s Sharing) (object ?s Juice))"), drinks) ==
        Trilean::True);
  CHECK(on_application_grounds(
            kb, "T", conj("(and (isa ?s Sharing) (object ?s Pizza))"), drinks) ==
        Trilean::False);
}

TEST_CASE("subsumption compares application grounds by entailment") {
  KnowledgeBase kb = taxonomy_kb();
  const NormFrame juice = frame("j", DeonticEvaluation::Optional, kJuiceScope);
  const NormFrame drinks = frame("d", DeonticEvaluation::Impermissible, kDrinkScope);
  const NormFrame all = frame("a", DeonticEvaluation::Impermissible, kAllScope);

  CHECK(subsumes(kb, "T", drinks, juice) == SubsumeKind::Strict);
  CHECK(subsumes(kb, "T", juice, drinks) == SubsumeKind::No);
  CHECK(subsumes(kb, "T", all, drinks) == SubsumeKind::Strict);
  CHECK(subsumes(kb, "T", juice, juice) == SubsumeKind::Mutual);
}

TEST_CASE("conflicts classify by the subsumption lattice") {
  KnowledgeBase kb = taxonomy_kb();
  const NormFrame perm_juice = frame("p", DeonticEvaluation::Optional, kJuiceScope);
  const NormFrame proh_juice = frame("q", DeonticEvaluation::Impermissible, kJuiceScope);
  const NormFrame proh_drinks = frame("q2", DeonticEvaluation::Impermissible, kDrinkScope);

  CHECK(classify_conflict(kb, "T", perm_juice, proh_juice) == ConflictType::Direct);
  CHECK(classify_conflict(kb, "T", perm_juice, proh_drinks) == ConflictType::Indirect);
  CHECK(classify_conflict(kb, "T", proh_drinks, perm_juice) == ConflictType::Indirect);

  // Same class: no conflict to classify.
  const NormFrame perm_drinks = frame("p2", DeonticEvaluation::Obligatory, kDrinkScope);
  CHECK_FALSE(classify_conflict(kb, "T", perm_juice, perm_drinks).has_value());

  // Cut on different dimensions: intersecting.
  const NormFrame perm_any_juice = frame(
      "p3", DeonticEvaluation::Optional, "(and (isa ?s Sharing) (object ?s Juice))");
  const NormFrame proh_dislikes = frame(
      "q3", DeonticEvaluation::Impermissible,
      "(and (isa ?s Sharing) (object ?s ?o) (isa ?o Drink) (polarity ?s dislikesType))");
  CHECK(classify_conflict(kb, "T", perm_any_juice, proh_dislikes) ==
        ConflictType::Intersecting);
  const Conjunction meet = conj(
      "(and (isa ?s Sharing) (object ?s Juice) (isa Juice Drink) (polarity ?s dislikesType))");
  CHECK(intersect_witness(kb, "T", perm_any_juice.behavior, proh_dislikes.behavior,
                          meet) == Trilean::True);
}

TEST_CASE("norm text round-trips frames in timestamp order") {
  NormStore store("Plato");
  store.add_testimony(frame("perm1", DeonticEvaluation::Optional, kJuiceScope));
  store.add_testimony(frame("proh1", DeonticEvaluation::Impermissible, kDrinkScope,
                            "(and (inConversation Plato Socrates))"));

  const std::string text = save_norm_text(store);
  NormStore again("Plato");
  load_norm_text(again, text);
  REQUIRE(again.frames().size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(again.frames()[i].id == store.frames()[i].id);
    CHECK(again.frames()[i].behavior == store.frames()[i].behavior);
    CHECK(again.frames()[i].context == store.frames()[i].context);
    CHECK(again.frames()[i].evaluation == store.frames()[i].evaluation);
  }
  CHECK(again.frames()[0].timestamp < again.frames()[1].timestamp);
}
