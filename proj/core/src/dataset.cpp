#include "normguard/dataset.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace normguard {

namespace {

using nlohmann::json;

/// Read-only world the oracle judges against: the built-in taxonomy reduced
/// to plain finite sets.
struct OracleWorld {
  Vocabulary vocab;
  std::map<std::string, std::set<std::string>> category_members;
  std::set<std::string> all_objects;
};

const OracleWorld& oracle_world() {
  static const OracleWorld world = [] {
    OracleWorld w;
    KnowledgeBase kb;
    kb.load_text(default_taxonomy_text());
    w.vocab = Vocabulary::from_kb(kb, "TaxonomyMt");
    for (const Literal& f : kb.microtheory("TaxonomyMt").facts) {
      if (f.predicate == "isa" && f.args.size() == 2) {
        w.category_members[f.args[1].name()].insert(f.args[0].name());
        w.all_objects.insert(f.args[0].name());
      }
    }
    return w;
  }();
  return world;
}

/// Finite extension of a behavior scope: object x polarity x hearer.
struct ActSet {
  std::set<std::string> objects;
  std::set<std::string> polarities;
  std::set<std::string> hearers;

  bool contains(const std::string& o, const std::string& p,
                const std::string& h) const {
    return objects.count(o) && polarities.count(p) && hearers.count(h);
  }
  bool subset_of(const ActSet& b) const {
    return std::includes(b.objects.begin(), b.objects.end(), objects.begin(),
                         objects.end()) &&
           std::includes(b.polarities.begin(), b.polarities.end(),
                         polarities.begin(), polarities.end()) &&
           std::includes(b.hearers.begin(), b.hearers.end(), hearers.begin(),
                         hearers.end());
  }
};

ActSet scope_set(const InfoScope& s, const OracleWorld& w,
                 const std::set<std::string>& hearer_universe) {
  ActSet a;
  switch (s.kind) {
    case TopicKind::All:
      a.objects = w.all_objects;
      break;
    case TopicKind::Object:
      a.objects = {s.symbol};
      break;
    case TopicKind::Category: {
      auto it = w.category_members.find(s.symbol);
      if (it != w.category_members.end()) a.objects = it->second;
      break;
    }
  }
  if (s.polarity) {
    a.polarities = {polarity_predicate(*s.polarity)};
  } else {
    a.polarities = {"likesType", "dislikesType"};
  }
  if (s.hearer) {
    a.hearers = {*s.hearer};
  } else {
    a.hearers = hearer_universe;
  }
  return a;
}

struct OracleFrame {
  ActSet set;
  std::string owner;
  bool prohibition = false;
  int ts = 0;
};

/// The two inference rules and their exceptions, over finite sets.
bool oracle_act_permissible(const std::vector<OracleFrame>& frames,
                            const std::string& owner, const std::string& object,
                            const std::string& polarity, const std::string& hearer,
                            ClosureAssumption closure) {
  auto applies = [&](const OracleFrame& f) {
    return f.owner == owner && f.set.contains(object, polarity, hearer);
  };
  if (closure == ClosureAssumption::Prohibitive) {
    for (const OracleFrame& perm : frames) {
      if (perm.prohibition || !applies(perm)) continue;
      bool defeated = false;
      for (const OracleFrame& proh : frames) {
        if (!proh.prohibition || proh.owner != owner) continue;
        // A later prohibition covering everything the permission covers.
        if (perm.ts < proh.ts && perm.set.subset_of(proh.set)) {
          defeated = true;
          break;
        }
        // A prohibition covering this act without covering the whole
        // permission.
        if (applies(proh) && !perm.set.subset_of(proh.set)) {
          defeated = true;
          break;
        }
      }
      if (!defeated) return true;
    }
    return false;
  }
  for (const OracleFrame& proh : frames) {
    if (!proh.prohibition || !applies(proh)) continue;
    bool defeated = false;
    for (const OracleFrame& perm : frames) {
      if (perm.prohibition || perm.owner != owner) continue;
      // A later permission covered entirely by the prohibition carves it out.
      if (proh.ts < perm.ts && perm.set.subset_of(proh.set)) {
        defeated = true;
        break;
      }
    }
    if (!defeated) return false;
  }
  return true;
}

}  // namespace

Response oracle_judge(const DialogueCase& c, ClosureAssumption closure) {
  const OracleWorld& w = oracle_world();
  const std::set<std::string> hearer_universe{c.speaker_a, c.speaker_b};

  std::vector<std::pair<Polarity, std::string>> prefs;
  for (const std::string* text : {&c.pref1, &c.pref2}) {
    const Statement st = parse_statement(*text, w.vocab);
    const auto& p = std::get<PreferenceStatement>(st);
    prefs.emplace_back(p.polarity, p.object);
  }

  std::vector<OracleFrame> frames;
  int ts = 0;
  for (const std::string* text : {&c.testimony1, &c.testimony2}) {
    const Statement st = parse_statement(*text, w.vocab);
    const auto& t = std::get<TestimonyStatement>(st);
    frames.push_back(OracleFrame{scope_set(t.scope, w, hearer_universe), c.speaker_a,
                                 t.evaluation == DeonticEvaluation::Impermissible,
                                 ++ts});
  }

  const Statement query_st = parse_statement(c.query, w.vocab);
  const auto& q = std::get<QuestionStatement>(query_st);
  const std::string act_polarity = polarity_predicate(q.polarity);

  bool any_candidate = false;
  for (const auto& [pol, obj] : prefs) {
    if (pol != q.polarity) continue;
    any_candidate = true;
    if (oracle_act_permissible(frames, q.person, obj, act_polarity, c.speaker_b,
                               closure)) {
      const bool likes = q.polarity == Polarity::Likes;
      return Response{likes ? ResponseKind::LikesAnswer : ResponseKind::DislikesAnswer,
                      q.person + (likes ? " likes " : " dislikes ") +
                          w.vocab.word_for(obj) + ".",
                      q.person, obj};
    }
  }
  if (any_candidate) return Response{ResponseKind::Refusal, "I can't say.", {}, {}};
  return Response{ResponseKind::Unknown, "I don't know.", {}, {}};
}

GridConfig grid_config_from_json(const std::string& text) {
  json j = json::parse(text);
  GridConfig c;
  c.speaker_a = j.value("speaker_a", c.speaker_a);
  c.speaker_b = j.value("speaker_b", c.speaker_b);
  c.topic_object = j.value("topic_object", c.topic_object);
  c.topic_category = j.value("topic_category", c.topic_category);
  c.overlap_object = j.value("overlap_object", c.overlap_object);
  c.overlap_same_cat = j.value("overlap_same_cat", c.overlap_same_cat);
  c.overlap_diff_cat = j.value("overlap_diff_cat", c.overlap_diff_cat);
  c.disjoint_object = j.value("disjoint_object", c.disjoint_object);
  c.disjoint_same_cat = j.value("disjoint_same_cat", c.disjoint_same_cat);
  c.disjoint_diff_cat = j.value("disjoint_diff_cat", c.disjoint_diff_cat);
  if (j.contains("closure")) {
    auto cl = closure_from_string(j.at("closure").get<std::string>());
    if (!cl) throw ParseError("closure must be prohibitive or permissive", 0);
    c.closure = *cl;
  }
  return c;
}

std::string grid_config_to_json(const GridConfig& c) {
  json j;
  j["speaker_a"] = c.speaker_a;
  j["speaker_b"] = c.speaker_b;
  j["topic_object"] = c.topic_object;
  j["topic_category"] = c.topic_category;
  j["overlap_object"] = c.overlap_object;
  j["overlap_same_cat"] = c.overlap_same_cat;
  j["overlap_diff_cat"] = c.overlap_diff_cat;
  j["disjoint_object"] = c.disjoint_object;
  j["disjoint_same_cat"] = c.disjoint_same_cat;
  j["disjoint_diff_cat"] = c.disjoint_diff_cat;
  j["closure"] = to_string(c.closure);
  return j.dump(2) + "\n";
}

std::vector<CaseFactors> enumerate_grid() {
  std::vector<CaseFactors> out;
  out.reserve(3 * 512);
  for (ConflictType t : {ConflictType::Direct, ConflictType::Indirect,
                         ConflictType::Intersecting}) {
    for (int bits = 0; bits < 512; ++bits) {
      CaseFactors f;
      f.conflict = t;
      f.pref1_polarity = (bits & 1) ? Polarity::Dislikes : Polarity::Likes;
      f.pref2_polarity = (bits & 2) ? Polarity::Dislikes : Polarity::Likes;
      f.prefs_same_category = !(bits & 4);
      f.permission_first = !(bits & 8);
      f.permission_must = (bits & 16) != 0;
      f.audience_specific = !(bits & 32);
      f.permission_scope_object = !(bits & 64);
      f.query_overlap = !(bits & 128);
      f.query_polarity = (bits & 256) ? Polarity::Dislikes : Polarity::Likes;
      out.push_back(f);
    }
  }
  return out;
}

namespace {

struct ScopePair {
  InfoScope perm;
  InfoScope proh;
};

/// Scope constructions per conflict type.  Direct: identical scopes.
/// Indirect: the prohibition one level broader.  Intersecting: the
/// prohibition cuts across the permission on audience or polarity, so
/// neither contains the other while both cover the topic object.
ScopePair conflict_scopes(const CaseFactors& f, const GridConfig& cfg) {
  ScopePair s;
  if (f.permission_scope_object) {
    s.perm.kind = TopicKind::Object;
    s.perm.symbol = cfg.topic_object;
  } else {
    s.perm.kind = TopicKind::Category;
    s.perm.symbol = cfg.topic_category;
  }
  switch (f.conflict) {
    case ConflictType::Direct:
      s.proh = s.perm;
      if (f.audience_specific) {
        s.perm.hearer = cfg.speaker_b;
        s.proh.hearer = cfg.speaker_b;
      }
      break;
    case ConflictType::Indirect:
      if (f.permission_scope_object) {
        s.proh.kind = TopicKind::Category;
        s.proh.symbol = cfg.topic_category;
      } else {
        s.proh.kind = TopicKind::All;
      }
      if (f.audience_specific) {
        s.perm.hearer = cfg.speaker_b;
        s.proh.hearer = cfg.speaker_b;
      }
      break;
    case ConflictType::Intersecting:
      if (f.permission_scope_object) {
        s.proh.kind = TopicKind::Category;
        s.proh.symbol = cfg.topic_category;
        if (f.audience_specific) {
          s.proh.hearer = cfg.speaker_b;
        } else {
          s.proh.polarity = Polarity::Dislikes;
        }
      } else {
        s.proh.kind = TopicKind::All;
        s.proh.polarity = Polarity::Dislikes;
        if (f.audience_specific) s.proh.hearer = cfg.speaker_b;
      }
      break;
  }
  return s;
}

const KnowledgeBase& certification_kb() {
  static const KnowledgeBase kb = [] {
    KnowledgeBase k;
    k.load_text(default_taxonomy_text());
    return k;
  }();
  return kb;
}

}  // namespace

DialogueCase build_case(int id, const CaseFactors& f, const GridConfig& cfg) {
  const OracleWorld& w = oracle_world();
  const ScopePair scopes = conflict_scopes(f, cfg);

  const std::string p1 = f.query_overlap ? cfg.overlap_object : cfg.disjoint_object;
  const std::string p2 =
      f.query_overlap
          ? (f.prefs_same_category ? cfg.overlap_same_cat : cfg.overlap_diff_cat)
          : (f.prefs_same_category ? cfg.disjoint_same_cat : cfg.disjoint_diff_cat);

  const TestimonyStatement perm{
      f.permission_must ? DeonticEvaluation::Obligatory : DeonticEvaluation::Optional,
      scopes.perm};
  const TestimonyStatement proh{DeonticEvaluation::Impermissible, scopes.proh};

  DialogueCase c;
  c.conflict = f.conflict;
  c.id = id;
  c.speaker_a = cfg.speaker_a;
  c.speaker_b = cfg.speaker_b;
  c.pref1 = render_statement(PreferenceStatement{f.pref1_polarity, p1}, w.vocab);
  c.pref2 = render_statement(PreferenceStatement{f.pref2_polarity, p2}, w.vocab);
  c.testimony1 = render_statement(f.permission_first ? Statement{perm} : Statement{proh},
                                  w.vocab);
  c.testimony2 = render_statement(f.permission_first ? Statement{proh} : Statement{perm},
                                  w.vocab);
  c.query =
      render_statement(QuestionStatement{cfg.speaker_a, f.query_polarity}, w.vocab);

  // Certify that the constructed pair instantiates the declared conflict.
  const KnowledgeBase& kb = certification_kb();
  const NormFrame pf = testimony_frame(perm, cfg.speaker_a);
  const NormFrame qf = testimony_frame(proh, cfg.speaker_a);
  auto got = classify_conflict(kb, "TaxonomyMt", pf, qf);
  if (!got || *got != f.conflict) {
    throw StoreError("case " + std::to_string(id) + " certification failed: built " +
                     (got ? to_string(*got) : std::string("no conflict")) +
                     " instead of " + to_string(f.conflict) + " from \"" +
                     c.testimony1 + "\" / \"" + c.testimony2 + "\"");
  }
  if (f.conflict == ConflictType::Intersecting) {
    const Conjunction witness = sharing_act(
        cfg.speaker_a,
        scopes.perm.kind == TopicKind::Object ? scopes.perm.symbol : cfg.topic_object,
        scopes.proh.polarity.value_or(Polarity::Dislikes),
        scopes.proh.hearer.value_or(cfg.speaker_b));
    const bool meet = definite(
        intersect_witness(kb, "TaxonomyMt", pf.behavior, qf.behavior, witness),
        "intersection witness");
    if (!meet) {
      throw StoreError("case " + std::to_string(id) +
                       ": no nontrivial shared act for the intersecting pair");
    }
  }

  c.label = oracle_judge(c, cfg.closure).text;
  return c;
}

std::vector<DialogueCase> generate_dataset(const GridConfig& cfg) {
  std::vector<DialogueCase> out;
  int id = 0;
  for (const CaseFactors& f : enumerate_grid()) {
    out.push_back(build_case(++id, f, cfg));
  }
  return out;
}

Response run_case(const DialogueCase& c, const SessionConfig& cfg,
                  int* guard_violations) {
  Session s(cfg);
  s.submit("#speaker: " + c.speaker_a);
  s.submit(c.pref1);
  s.submit(c.pref2);
  s.submit(c.testimony1);
  s.submit(c.testimony2);
  s.submit("#speaker: " + c.speaker_b);
  Response r = s.submit(c.query);
  if (guard_violations) *guard_violations += s.guard_violations();
  return r;
}

EvalReport evaluate(const std::vector<DialogueCase>& cases, const EvalOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  EvalReport rep;
  rep.total = static_cast<int>(cases.size());
  rep.closure = to_string(opts.closure);

  struct Slot {
    bool ok = false;
    bool answered = false;
    int guard_violations = 0;
    std::string got;
    std::vector<std::string> trace;
  };
  std::vector<Slot> slots(cases.size());

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(
                                                            cases.size() ? cases.size() : 1)));
  auto worker = [&](int offset) {
    for (std::size_t i = offset; i < cases.size(); i += jobs) {
      SessionConfig scfg;
      scfg.closure = opts.closure;
      scfg.depth_limit = opts.depth_limit;
      scfg.recheck_guard = opts.recheck_guard;
      Slot& slot = slots[i];
      try {
        Response r = run_case(cases[i], scfg, &slot.guard_violations);
        slot.got = r.text;
        slot.answered = r.kind == ResponseKind::LikesAnswer ||
                        r.kind == ResponseKind::DislikesAnswer;
        slot.ok = r.text == cases[i].label;
        if (!slot.ok) {
          SessionConfig tcfg = scfg;
          int ignored = 0;
          Session ts(tcfg);
          ts.submit("#speaker: " + cases[i].speaker_a);
          ts.submit(cases[i].pref1);
          ts.submit(cases[i].pref2);
          ts.submit(cases[i].testimony1);
          ts.submit(cases[i].testimony2);
          ts.submit("#speaker: " + cases[i].speaker_b);
          ts.submit(cases[i].query);
          (void)ignored;
          if (ts.last_outcome()) slot.trace = ts.last_outcome()->trace;
        }
      } catch (const std::exception& e) {
        slot.ok = false;
        slot.got = std::string("<error: ") + e.what() + ">";
        slot.trace = {slot.got};
      }
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker, k);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Slot& slot = slots[i];
    auto& [corr, tot] = rep.per_conflict[to_string(cases[i].conflict)];
    ++tot;
    if (slot.ok) {
      ++rep.correct;
      ++corr;
    } else {
      rep.mismatches.push_back(CaseResult{cases[i].id, to_string(cases[i].conflict),
                                          cases[i].label, slot.got, slot.trace});
    }
    if (opts.recheck_guard && slot.answered) ++rep.guard_rechecks;
    rep.guard_violations += slot.guard_violations;
  }
  rep.chance_agreement_log10 = rep.total * std::log10(0.2);
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string report_to_json(const EvalReport& r) {
  json j;
  j["schema_version"] = 1;
  j["closure"] = r.closure;
  j["total"] = r.total;
  j["correct"] = r.correct;
  json per = json::object();
  for (const auto& [type, counts] : r.per_conflict) {
    per[type] = {{"correct", counts.first}, {"total", counts.second}};
  }
  j["per_conflict"] = per;
  json mm = json::array();
  for (const CaseResult& m : r.mismatches) {
    mm.push_back({{"id", m.id},
                  {"conflict", m.conflict},
                  {"expected", m.expected},
                  {"got", m.got},
                  {"trace", m.trace}});
  }
  j["mismatches"] = mm;
  j["guard"] = {{"rechecks", r.guard_rechecks}, {"violations", r.guard_violations}};
  j["chance_agreement_log10"] = r.chance_agreement_log10;
  j["seconds"] = r.seconds;
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& r) {
  std::ostringstream os;
  os << "closure: " << r.closure << "\n";
  os << "correct: " << r.correct << "/" << r.total << "\n";
  for (const auto& [type, counts] : r.per_conflict) {
    os << "  " << type << ": " << counts.first << "/" << counts.second << "\n";
  }
  os << "guard rechecks: " << r.guard_rechecks
     << ", violations: " << r.guard_violations << "\n";
  os << "chance agreement: 10^" << r.chance_agreement_log10 << "\n";
  os << "seconds: " << r.seconds << "\n";
  std::size_t shown = 0;
  for (const CaseResult& m : r.mismatches) {
    if (++shown > 20) {
      os << "  ... " << (r.mismatches.size() - 20) << " more mismatches\n";
      break;
    }
    os << "  mismatch id " << m.id << " (" << m.conflict << "): expected \""
       << m.expected << "\", got \"" << m.got << "\"\n";
  }
  return os.str();
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_psv_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (true) {
    std::string field;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        field += line[i++];
      }
      if (!closed) throw ParseError("unterminated quoted field", lineno);
      if (i < line.size() && line[i] != '|') {
        throw ParseError("text after closing quote", lineno);
      }
    } else {
      while (i < line.size() && line[i] != '|') field += line[i++];
    }
    fields.push_back(std::move(field));
    if (i >= line.size()) break;
    ++i;  // skip '|'
  }
  return fields;
}

}  // namespace

std::string cases_to_psv(const std::vector<DialogueCase>& cases) {
  std::ostringstream os;
  for (const DialogueCase& c : cases) {
    os << to_string(c.conflict) << '|' << c.id << '|' << c.speaker_a << '|'
       << quoted(c.pref1) << '|' << quoted(c.pref2) << '|' << quoted(c.testimony1)
       << '|' << quoted(c.testimony2) << '|' << c.speaker_b << '|'
       << quoted(c.query) << '|' << quoted(c.label) << '\n';
  }
  return os.str();
}

std::vector<DialogueCase> cases_from_psv(std::string_view text) {
  std::vector<DialogueCase> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_psv_line(line, lineno);
    if (f.size() != 10) {
      throw ParseError("expected 10 fields, found " + std::to_string(f.size()),
                       lineno);
    }
    DialogueCase c;
    auto type = conflict_type_from_string(f[0]);
    if (!type) throw ParseError("unknown conflict type " + f[0], lineno);
    c.conflict = *type;
    try {
      c.id = std::stoi(f[1]);
    } catch (const std::exception&) {
      throw ParseError("bad case id " + f[1], lineno);
    }
    c.speaker_a = f[2];
    c.pref1 = f[3];
    c.pref2 = f[4];
    c.testimony1 = f[5];
    c.testimony2 = f[6];
    c.speaker_b = f[7];
    c.query = f[8];
    c.label = f[9];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace normguard
