#include "normguard/soundness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace normguard {

namespace {

/// Deterministic pick from a vector.
template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& xs) {
  std::uniform_int_distribution<std::size_t> d(0, xs.size() - 1);
  return xs[d(rng)];
}

int roll(std::mt19937& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng);
}

InfoScope random_scope(std::mt19937& rng, const Vocabulary& vocab,
                       const std::vector<std::string>& persons) {
  InfoScope s;
  switch (roll(rng, 0, 2)) {
    case 0: s.kind = TopicKind::All; break;
    case 1:
      s.kind = TopicKind::Category;
      s.symbol = pick(rng, vocab.categories());
      break;
    default:
      s.kind = TopicKind::Object;
      s.symbol = pick(rng, vocab.objects());
      break;
  }
  switch (roll(rng, 0, 2)) {
    case 0: break;
    case 1: s.polarity = Polarity::Likes; break;
    default: s.polarity = Polarity::Dislikes; break;
  }
  switch (roll(rng, 0, 2)) {
    case 0: break;
    default: s.hearer = pick(rng, persons); break;
  }
  return s;
}

Conjunction context_from_pool(std::mt19937& rng,
                              const std::vector<Conjunction>& pool) {
  return pool[static_cast<std::size_t>(roll(rng, 0, static_cast<int>(pool.size()) - 1))];
}

}  // namespace

SoundnessResult check_soundness(const SoundnessOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  SoundnessResult result;

  KnowledgeBase kb;
  kb.load_text(default_taxonomy_text());
  kb.create_microtheory("Plato");
  kb.add_genl_mt("Plato", "TaxonomyMt");
  const Vocabulary vocab = Vocabulary::from_kb(kb, "TaxonomyMt");
  const std::vector<std::string> persons{"Plato", "Socrates"};
  const std::string owner = "Plato";

  // Context pool: unconditional, plus two ground situations so context
  // entailment gets exercised in both directions.
  std::vector<Conjunction> contexts;
  contexts.push_back(Conjunction{});
  Conjunction c1;
  c1.literals.push_back(Literal{
      "inConversation", {Term::constant("Plato"), Term::constant("Socrates")}});
  contexts.push_back(c1);
  Conjunction c2;
  c2.literals.push_back(Literal{
      "inConversation", {Term::constant("Plato"), Term::constant("Plato")}});
  contexts.push_back(c2);

  CalculusOptions copts;
  copts.depth_limit = opts.depth_limit;

  // Each store gets its own stream so the sequence is independent of how
  // stores are assigned to workers.
  std::atomic<long long> probes{0};
  std::mutex violations_mutex;

  auto run_store = [&](int i) {
    std::seed_seq seq{opts.seed, static_cast<unsigned>(i)};
    std::mt19937 rng(seq);
    NormStore store(owner);
    const int frames = roll(rng, 0, opts.max_frames);
    for (int k = 0; k < frames; ++k) {
      NormFrame f;
      f.owner = owner;
      f.behavior = scope_behavior(random_scope(rng, vocab, persons), owner);
      // Mostly unconditional, sometimes situation-gated.
      f.context = roll(rng, 0, 9) < 7 ? Conjunction{} : context_from_pool(rng, contexts);
      switch (roll(rng, 0, 2)) {
        case 0: f.evaluation = DeonticEvaluation::Obligatory; break;
        case 1: f.evaluation = DeonticEvaluation::Optional; break;
        default: f.evaluation = DeonticEvaluation::Impermissible; break;
      }
      store.add_testimony(std::move(f));
    }

    for (int p = 0; p < opts.probes_per_store; ++p) {
      const Conjunction act =
          sharing_act(owner, pick(rng, vocab.objects()),
                      roll(rng, 0, 1) ? Polarity::Likes : Polarity::Dislikes,
                      pick(rng, persons));
      const Conjunction situation = context_from_pool(rng, contexts);
      for (ClosureAssumption closure :
           {ClosureAssumption::Prohibitive, ClosureAssumption::Permissive}) {
        const Judgment perm =
            permissible(kb, store, owner, act, situation, closure, copts);
        const Judgment imperm =
            impermissible(kb, store, owner, act, situation, closure, copts);
        ++probes;
        if (perm.verdict != imperm.verdict) {
          std::ostringstream os;
          os << "store " << i << " act " << to_string(to_sexpr(act)) << " context "
             << to_string(to_sexpr(situation)) << ": permissible says "
             << to_string(perm.verdict) << " but impermissible says "
             << to_string(imperm.verdict);
          std::lock_guard<std::mutex> lock(violations_mutex);
          result.violations.push_back(
              SoundnessViolation{i, to_string(closure), os.str()});
        }
      }
    }
  };

  const int jobs = std::max(1, std::min(opts.jobs, opts.stores > 0 ? opts.stores : 1));
  if (jobs == 1) {
    for (int i = 0; i < opts.stores; ++i) run_store(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int k = 0; k < jobs; ++k) {
      pool.emplace_back([&, k] {
        for (int i = k; i < opts.stores; i += jobs) run_store(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  result.stores_checked = opts.stores;
  result.probes_checked = probes;
  std::sort(result.violations.begin(), result.violations.end(),
            [](const SoundnessViolation& a, const SoundnessViolation& b) {
              return a.store_index < b.store_index;
            });

  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string soundness_to_json(const SoundnessResult& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["stores_checked"] = r.stores_checked;
  j["probes_checked"] = r.probes_checked;
  j["seconds"] = r.seconds;
  nlohmann::json vs = nlohmann::json::array();
  for (const SoundnessViolation& v : r.violations) {
    vs.push_back({{"store", v.store_index}, {"closure", v.closure}, {"detail", v.detail}});
  }
  j["violations"] = vs;
  return j.dump(2) + "\n";
}

std::string soundness_to_text(const SoundnessResult& r) {
  std::ostringstream os;
  os << "stores checked: " << r.stores_checked << "\n";
  os << "probe pairs checked: " << r.probes_checked << "\n";
  os << "violations: " << r.violations.size() << "\n";
  std::size_t shown = 0;
  for (const SoundnessViolation& v : r.violations) {
    if (++shown > 10) {
      os << "  ...\n";
      break;
    }
    os << "  [" << v.closure << "] " << v.detail << "\n";
  }
  os << "seconds: " << r.seconds << "\n";
  return os.str();
}

}  // namespace normguard
