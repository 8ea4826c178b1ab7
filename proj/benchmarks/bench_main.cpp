// Microbenchmarks for the proof engine, the entailment layer, the deontic
// calculus, and the end-to-end dialogue pipeline.
#include <benchmark/benchmark.h>

#include <sstream>

#include "normguard/dataset.hpp"

using namespace normguard;

namespace {

// Linear rule chain p0(a), p{i+1}(?x) <- p{i}(?x): proof depth grows with n.
KnowledgeBase chain_kb(int n) {
  std::ostringstream os;
  os << "(mt M)\n(fact (p0 a))\n";
  for (int i = 0; i < n; ++i) {
    os << "(rule (p" << i + 1 << " ?x) (p" << i << " ?x))\n";
  }
  KnowledgeBase kb;
  kb.load_text(os.str());
  return kb;
}

NormFrame scoped(const std::string& id, DeonticEvaluation e, const InfoScope& scope) {
  NormFrame f;
  f.id = id;
  f.owner = "Karli";
  f.behavior = scope_behavior(scope, "Karli");
  f.evaluation = e;
  return f;
}

// Six frames mixing object, category, and blanket scopes.
NormStore mixed_store() {
  NormStore st("Karli");
  st.add_testimony(scoped("n1", DeonticEvaluation::Optional,
                          {TopicKind::Object, "Juice", {}, {}}));
  st.add_testimony(scoped("n2", DeonticEvaluation::Impermissible,
                          {TopicKind::Category, "Drink", {}, "Socrates"}));
  st.add_testimony(scoped("n3", DeonticEvaluation::Obligatory,
                          {TopicKind::Object, "Pizza", Polarity::Likes, {}}));
  st.add_testimony(scoped("n4", DeonticEvaluation::Impermissible,
                          {TopicKind::All, "", Polarity::Dislikes, {}}));
  st.add_testimony(scoped("n5", DeonticEvaluation::Optional,
                          {TopicKind::Category, "Food", {}, {}}));
  st.add_testimony(scoped("n6", DeonticEvaluation::Impermissible,
                          {TopicKind::Object, "AI", {}, "Jan"}));
  return st;
}

void solve_chain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  KnowledgeBase kb = chain_kb(n);
  const Literal goal{"p" + std::to_string(n), {Term::constant("a")}};
  for (auto _ : state) {
    SolveResult r = kb.solve(std::vector<Goal>{Goal::positive(goal)}, "M");
    benchmark::DoNotOptimize(r.solutions);
  }
}

void entail_scopes(benchmark::State& state) {
  Session session;
  session.ensure_person("Karli");
  const Conjunction narrow =
      scope_behavior({TopicKind::Object, "Juice", Polarity::Likes, "Socrates"}, "Karli");
  const Conjunction broad = scope_behavior({TopicKind::Category, "Drink", {}, {}}, "Karli");
  for (auto _ : state) {
    Trilean t = entails(session.kb(), "Karli", narrow, broad);
    benchmark::DoNotOptimize(t);
  }
}

void judge_act(benchmark::State& state) {
  Session session;
  session.ensure_person("Karli");
  NormStore store = mixed_store();
  const Conjunction act = sharing_act("Karli", "Juice", Polarity::Likes, "Socrates");
  const ClosureAssumption closure = state.range(0) == 0 ? ClosureAssumption::Prohibitive
                                                        : ClosureAssumption::Permissive;
  for (auto _ : state) {
    Judgment j = permissible(session.kb(), store, "Karli", act, Conjunction{}, closure);
    benchmark::DoNotOptimize(j.verdict);
  }
}

void dialogue_case_end_to_end(benchmark::State& state) {
  // One intersecting-conflict dialogue: fresh session, four statements, one
  // guarded answer.
  const std::vector<CaseFactors> grid = enumerate_grid();
  const DialogueCase c = build_case(1033, grid[1032], GridConfig{});
  SessionConfig cfg;
  cfg.recheck_guard = true;
  for (auto _ : state) {
    int violations = 0;
    Response r = run_case(c, cfg, &violations);
    benchmark::DoNotOptimize(r.kind);
  }
}

void finite_reference_label(benchmark::State& state) {
  const std::vector<CaseFactors> grid = enumerate_grid();
  const DialogueCase c = build_case(1033, grid[1032], GridConfig{});
  for (auto _ : state) {
    Response r = oracle_judge(c, ClosureAssumption::Prohibitive);
    benchmark::DoNotOptimize(r.kind);
  }
}

BENCHMARK(solve_chain)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(entail_scopes);
BENCHMARK(judge_act)->Arg(0)->Arg(1);
BENCHMARK(dialogue_case_end_to_end);
BENCHMARK(finite_reference_label);

}  // namespace

BENCHMARK_MAIN();
