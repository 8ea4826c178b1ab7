#include "normguard/dialogue.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace normguard {

std::string polarity_predicate(Polarity p) {
  return p == Polarity::Likes ? "likesType" : "dislikesType";
}

std::optional<Polarity> polarity_from_predicate(const std::string& pred) {
  if (pred == "likesType") return Polarity::Likes;
  if (pred == "dislikesType") return Polarity::Dislikes;
  return std::nullopt;
}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// Splits on whitespace and strips terminal punctuation off the last word.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream in(line);
  std::string w;
  while (in >> w) words.push_back(w);
  if (!words.empty()) {
    std::string& last = words.back();
    while (!last.empty() &&
           (last.back() == '.' || last.back() == '?' || last.back() == '!')) {
      last.pop_back();
    }
    if (last.empty()) words.pop_back();
  }
  return words;
}

bool plausible_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c) || c == '-'; });
}

}  // namespace

Vocabulary Vocabulary::from_kb(const KnowledgeBase& kb, const std::string& mt) {
  Vocabulary v;
  std::vector<std::string> first_args;
  auto push_unique = [](std::vector<std::string>& out, const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const std::string& name : kb.visible_from(mt)) {
    for (const Literal& f : kb.microtheory(name).facts) {
      if (f.predicate == "surfaceForm" && f.args.size() == 2) {
        const std::string& sym = f.args[0].name();
        const std::string word = lowercase(f.args[1].name());
        v.word_to_symbol_.emplace(word, sym);
        v.symbol_to_word_.emplace(sym, word);
      } else if (f.predicate == "isa" && f.args.size() == 2) {
        push_unique(first_args, f.args[0].name());
        push_unique(v.categories_, f.args[1].name());
      }
    }
  }
  for (const std::string& sym : first_args) {
    if (std::find(v.categories_.begin(), v.categories_.end(), sym) ==
        v.categories_.end()) {
      v.objects_.push_back(sym);
    }
  }
  return v;
}

std::optional<std::string> Vocabulary::symbol_for(const std::string& word) const {
  auto it = word_to_symbol_.find(lowercase(word));
  if (it == word_to_symbol_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::word_for(const std::string& symbol) const {
  auto it = symbol_to_word_.find(symbol);
  return it == symbol_to_word_.end() ? symbol : it->second;
}

bool Vocabulary::is_category(const std::string& symbol) const {
  return std::find(categories_.begin(), categories_.end(), symbol) !=
         categories_.end();
}

bool Vocabulary::is_object(const std::string& symbol) const {
  return std::find(objects_.begin(), objects_.end(), symbol) != objects_.end();
}

bool Vocabulary::known(const std::string& symbol) const {
  return is_category(symbol) || is_object(symbol);
}

namespace {

InfoScope parse_scope(const std::vector<std::string>& words, std::size_t i,
                      const Vocabulary& v, std::size_t line_pos) {
  InfoScope scope;
  if (i >= words.size()) {
    throw ParseError("expected preferences, likes, or dislikes", line_pos);
  }
  const std::string head = lowercase(words[i]);
  if (head == "preferences") {
    scope.polarity = std::nullopt;
  } else if (head == "likes") {
    scope.polarity = Polarity::Likes;
  } else if (head == "dislikes") {
    scope.polarity = Polarity::Dislikes;
  } else {
    throw ParseError("expected preferences, likes, or dislikes, got " + words[i],
                     line_pos);
  }
  ++i;
  if (i < words.size() && lowercase(words[i]) == "about") {
    if (i + 1 >= words.size()) {
      throw ParseError("expected a topic after 'about'", line_pos);
    }
    auto sym = v.symbol_for(words[i + 1]);
    if (!sym) throw VocabularyError("unknown topic word: " + words[i + 1]);
    scope.symbol = *sym;
    scope.kind = v.is_category(*sym) ? TopicKind::Category : TopicKind::Object;
    i += 2;
  }
  if (i < words.size() && lowercase(words[i]) == "with") {
    if (i + 1 >= words.size() || !plausible_name(words[i + 1])) {
      throw ParseError("expected a person after 'with'", line_pos);
    }
    scope.hearer = words[i + 1];
    i += 2;
  }
  if (i != words.size()) {
    throw ParseError("unexpected trailing words after the statement", line_pos);
  }
  return scope;
}

}  // namespace

Statement parse_statement(const std::string& raw, const Vocabulary& v) {
  const std::string line = trim(raw);
  if (line.empty()) throw ParseError("empty statement", 0);

  if (line[0] == '#') {
    std::size_t colon = line.find(':');
    if (colon == std::string::npos ||
        lowercase(trim(line.substr(1, colon - 1))) != "speaker") {
      throw ParseError("expected #speaker: <name>", 0);
    }
    std::string name = trim(line.substr(colon + 1));
    if (!plausible_name(name)) {
      throw ParseError("expected a speaker name after the colon", colon + 1);
    }
    return SpeakerDirective{name};
  }

  std::vector<std::string> words = tokenize(line);
  std::vector<std::string> low;
  low.reserve(words.size());
  for (const auto& w : words) low.push_back(lowercase(w));

  if (low.size() == 3 && low[0] == "i" && (low[1] == "like" || low[1] == "dislike")) {
    auto sym = v.symbol_for(words[2]);
    if (!sym) throw VocabularyError("unknown object word: " + words[2]);
    if (!v.is_object(*sym)) {
      throw VocabularyError("preferences are about objects, not categories: " +
                            words[2]);
    }
    return PreferenceStatement{
        low[1] == "like" ? Polarity::Likes : Polarity::Dislikes, *sym};
  }

  if (low.size() >= 5 && low[0] == "you" && (low[1] == "may" || low[1] == "must") &&
      low[2] == "share" && low[3] == "my") {
    DeonticEvaluation e = low[1] == "may" ? DeonticEvaluation::Optional
                                          : DeonticEvaluation::Obligatory;
    return TestimonyStatement{e, parse_scope(words, 4, v, 0)};
  }

  if (low.size() >= 5 && low[0] == "do" && low[1] == "not" && low[2] == "share" &&
      low[3] == "my") {
    return TestimonyStatement{DeonticEvaluation::Impermissible,
                              parse_scope(words, 4, v, 0)};
  }

  if (low.size() == 4 && low[0] == "what" && low[1] == "does" &&
      (low[3] == "like" || low[3] == "dislike")) {
    if (!plausible_name(words[2])) {
      throw ParseError("expected a person name in the question", 0);
    }
    return QuestionStatement{
        words[2], low[3] == "like" ? Polarity::Likes : Polarity::Dislikes};
  }

  throw ParseError("unrecognized statement: " + line, 0);
}

std::string render_statement(const Statement& st, const Vocabulary& v) {
  if (const auto* p = std::get_if<PreferenceStatement>(&st)) {
    return std::string("I ") + (p->polarity == Polarity::Likes ? "like" : "dislike") +
           " " + v.word_for(p->object) + ".";
  }
  if (const auto* t = std::get_if<TestimonyStatement>(&st)) {
    std::string out;
    switch (t->evaluation) {
      case DeonticEvaluation::Optional: out = "You may share my "; break;
      case DeonticEvaluation::Obligatory: out = "You must share my "; break;
      case DeonticEvaluation::Impermissible: out = "Do not share my "; break;
    }
    if (!t->scope.polarity) {
      out += "preferences";
    } else {
      out += *t->scope.polarity == Polarity::Likes ? "likes" : "dislikes";
    }
    if (t->scope.kind != TopicKind::All) out += " about " + v.word_for(t->scope.symbol);
    if (t->scope.hearer) out += " with " + *t->scope.hearer;
    return out + ".";
  }
  if (const auto* q = std::get_if<QuestionStatement>(&st)) {
    return "What does " + q->person +
           (q->polarity == Polarity::Likes ? " like?" : " dislike?");
  }
  return "#speaker: " + std::get<SpeakerDirective>(st).name;
}

Conjunction scope_behavior(const InfoScope& scope, const std::string& owner) {
  const Term share = Term::variable("?share");
  Conjunction c;
  c.literals.push_back(Literal{"isa", {share, Term::constant("SharingPref")}});
  c.literals.push_back(Literal{"prefOwner", {share, Term::constant(owner)}});
  if (scope.kind == TopicKind::Object) {
    c.literals.push_back(Literal{"object", {share, Term::constant(scope.symbol)}});
  } else if (scope.kind == TopicKind::Category) {
    const Term o = Term::variable("?o");
    c.literals.push_back(Literal{"object", {share, o}});
    c.literals.push_back(Literal{"isa", {o, Term::constant(scope.symbol)}});
  }
  if (scope.polarity) {
    c.literals.push_back(Literal{
        "polarity", {share, Term::constant(polarity_predicate(*scope.polarity))}});
  }
  if (scope.hearer) {
    c.literals.push_back(Literal{"hearer", {share, Term::constant(*scope.hearer)}});
  }
  return c;
}

Conjunction sharing_act(const std::string& owner, const std::string& object,
                        Polarity polarity, const std::string& hearer) {
  InfoScope scope;
  scope.kind = TopicKind::Object;
  scope.symbol = object;
  scope.polarity = polarity;
  scope.hearer = hearer;
  return scope_behavior(scope, owner);
}

NormFrame testimony_frame(const TestimonyStatement& st, const std::string& owner) {
  NormFrame f;
  f.owner = owner;
  f.behavior = scope_behavior(st.scope, owner);
  f.evaluation = st.evaluation;
  return f;
}

std::string to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::LikesAnswer: return "LikesAnswer";
    case ResponseKind::DislikesAnswer: return "DislikesAnswer";
    case ResponseKind::Unknown: return "Unknown";
    case ResponseKind::Refusal: return "Refusal";
    case ResponseKind::Ack: return "Ack";
  }
  return "Ack";
}

std::string default_taxonomy_text() {
  return R"((mt TaxonomyMt)
(fact (isa Juice Drink))
(fact (isa Soda Drink))
(fact (isa Coffee Drink))
(fact (isa Pizza Food))
(fact (isa Salad Food))
(fact (isa Sushi Food))
(fact (isa AI AcademicTopic))
(fact (isa Logic AcademicTopic))
(fact (isa Ethics AcademicTopic))
(rule (isa ?x Drink) (isa ?x Juice))
(rule (isa ?x Drink) (isa ?x Soda))
(rule (isa ?x Drink) (isa ?x Coffee))
(rule (isa ?x Food) (isa ?x Pizza))
(rule (isa ?x Food) (isa ?x Salad))
(rule (isa ?x Food) (isa ?x Sushi))
(rule (isa ?x AcademicTopic) (isa ?x AI))
(rule (isa ?x AcademicTopic) (isa ?x Logic))
(rule (isa ?x AcademicTopic) (isa ?x Ethics))
(fact (surfaceForm Drink drinks))
(fact (surfaceForm Food foods))
(fact (surfaceForm AcademicTopic topics))
(fact (surfaceForm Juice juice))
(fact (surfaceForm Soda soda))
(fact (surfaceForm Coffee coffee))
(fact (surfaceForm Pizza pizza))
(fact (surfaceForm Salad salad))
(fact (surfaceForm Sushi sushi))
(fact (surfaceForm AI ai))
(fact (surfaceForm Logic logic))
(fact (surfaceForm Ethics ethics))
)";
}

Session::Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
  const std::string taxonomy =
      cfg_.taxonomy_text.empty() ? default_taxonomy_text() : cfg_.taxonomy_text;
  kb_.load_text(taxonomy);
  if (!kb_.has_microtheory(cfg_.taxonomy_mt)) {
    throw UnknownMicrotheoryError("taxonomy microtheory " + cfg_.taxonomy_mt +
                                  " is not defined by the taxonomy text");
  }
  vocab_ = Vocabulary::from_kb(kb_, cfg_.taxonomy_mt);
  const std::string methods =
      cfg_.methods_text.empty() ? default_methods_text() : cfg_.methods_text;
  for (const SExpr& form : parse_sexprs(methods)) {
    planner_.register_method(method_from_sexpr(form));
  }
}

void Session::set_speaker(const std::string& name) {
  if (!plausible_name(name)) throw ParseError("bad speaker name: " + name, 0);
  ensure_person(name);
  speaker_ = name;
}

void Session::ensure_person(const std::string& name) {
  if (!kb_.has_microtheory(name)) {
    kb_.create_microtheory(name);
    kb_.add_genl_mt(name, cfg_.taxonomy_mt);
  }
  stores_.emplace(name, NormStore(name));
}

Statement Session::parse(const std::string& line) const {
  return parse_statement(line, vocab_);
}

Response Session::submit(const std::string& line) {
  return apply(parse(line));
}

Response Session::apply(const Statement& st) {
  Response r;
  if (const auto* d = std::get_if<SpeakerDirective>(&st)) {
    set_speaker(d->name);
    r = Response{ResponseKind::Ack, "Okay.", {}, {}};
  } else if (const auto* p = std::get_if<PreferenceStatement>(&st)) {
    if (!vocab_.is_object(p->object)) {
      throw VocabularyError("unknown preference object: " + p->object);
    }
    ensure_person(speaker_);
    kb_.assert_fact(speaker_,
                    Literal{polarity_predicate(p->polarity),
                            {Term::constant(speaker_), Term::constant(p->object)}});
    r = Response{ResponseKind::Ack, "Okay.", {}, {}};
  } else if (const auto* t = std::get_if<TestimonyStatement>(&st)) {
    if (t->scope.kind == TopicKind::Category && !vocab_.is_category(t->scope.symbol)) {
      throw VocabularyError("unknown category: " + t->scope.symbol);
    }
    if (t->scope.kind == TopicKind::Object && !vocab_.is_object(t->scope.symbol)) {
      throw VocabularyError("unknown object: " + t->scope.symbol);
    }
    ensure_person(speaker_);
    stores_.find(speaker_)->second.add_testimony(testimony_frame(*t, speaker_));
    r = Response{ResponseKind::Ack, "Okay.", {}, {}};
  } else {
    r = answer_question(std::get<QuestionStatement>(st));
  }
  transcript_.emplace_back(render_statement(st, vocab_), r.text);
  return r;
}

std::vector<Term> Session::candidate_pool(const std::string& owner) const {
  std::vector<Term> pool;
  std::vector<std::string> seen;
  for (const std::string& name : kb_.visible_from(owner)) {
    for (const Literal& f : kb_.microtheory(name).facts) {
      for (const Term& a : f.args) {
        if (!a.is_constant()) continue;
        if (std::find(seen.begin(), seen.end(), a.name()) == seen.end()) {
          seen.push_back(a.name());
          pool.push_back(a);
        }
      }
    }
  }
  return pool;
}

Response Session::answer_question(const QuestionStatement& q) {
  ensure_person(speaker_);
  ensure_person(q.person);
  const std::string& owner = q.person;
  const std::string& asker = speaker_;
  const std::string pred = polarity_predicate(q.polarity);

  ++discourse_count_;
  const Term d = Term::constant("d" + std::to_string(discourse_count_));
  const Term obj = Term::variable("?q-object");

  PlanQuery pq;
  pq.discourse.literals.push_back(
      Literal{"askingPreference",
              {Term::constant(pred), obj, Term::constant(owner), Term::constant(asker)}});
  pq.action = Literal{"respondToUser",
                      {d, Term::constant(pred), obj, Term::constant(owner),
                       Term::constant(asker)}};
  pq.discourse_id = d;
  pq.closure = cfg_.closure;
  pq.depth_limit = cfg_.depth_limit;
  pq.recheck_guard = cfg_.recheck_guard;
  pq.existential_pool = candidate_pool(owner);

  PlanOutcome out = planner_.attempt_action(kb_, stores_, pq);
  last_outcome_ = out;
  if (out.guard_violation) ++guard_violations_;

  switch (out.kind) {
    case PlanOutcomeKind::Executed: {
      if (out.steps.empty() || out.steps[0].verb != "respond" ||
          out.steps[0].args.size() != 2 ||
          !std::holds_alternative<LiteralPattern>(out.steps[0].args[1])) {
        throw PlanError("executed plan is not a respond step");
      }
      const auto& lit = std::get<LiteralPattern>(out.steps[0].args[1]);
      auto pol = polarity_from_predicate(lit.predicate.name());
      if (!pol || lit.args.size() != 2) {
        throw PlanError("respond step carries an unexpected sentence: " +
                        to_string(lit));
      }
      const std::string person = lit.args[0].name();
      const std::string object = lit.args[1].name();
      const bool likes = *pol == Polarity::Likes;
      return Response{likes ? ResponseKind::LikesAnswer : ResponseKind::DislikesAnswer,
                      person + (likes ? " likes " : " dislikes ") +
                          vocab_.word_for(object) + ".",
                      person, object};
    }
    case PlanOutcomeKind::Refused:
      return Response{ResponseKind::Refusal, "I can't say.", {}, {}};
    case PlanOutcomeKind::NoBinding:
      return Response{ResponseKind::Unknown, "I don't know.", {}, {}};
    case PlanOutcomeKind::NoMethod:
      throw PlanError("no method registered for respondToUser");
  }
  throw PlanError("unreachable plan outcome");
}

std::vector<std::string> Session::norm_summary() const {
  std::vector<std::string> out;
  for (const auto& [owner, store] : stores_) {
    for (const NormFrame& f : store.frames()) {
      out.push_back(to_string(f));
    }
  }
  return out;
}

std::vector<Response> run_script(Session& session, std::string_view text) {
  std::vector<Response> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#' && lowercase(t).rfind("#speaker", 0) != 0) continue;
    out.push_back(session.submit(t));
  }
  return out;
}

}  // namespace normguard
