#pragma once

#include "normguard/planner.hpp"

namespace normguard {

enum class Polarity { Likes, Dislikes };

/// Predicate symbol recording a preference of this polarity.
std::string polarity_predicate(Polarity p);
std::optional<Polarity> polarity_from_predicate(const std::string& pred);

/// How much of the owner's preference information a piece of testimony
/// covers: everything, everything about one category, or one object —
/// optionally narrowed to one polarity and/or one hearer.
enum class TopicKind { All, Category, Object };

struct InfoScope {
  TopicKind kind = TopicKind::All;
  std::string symbol;                    // category or object, per kind
  std::optional<Polarity> polarity;      // absent covers likes and dislikes
  std::optional<std::string> hearer;     // absent covers every hearer
  bool operator==(const InfoScope&) const = default;
};

struct PreferenceStatement {
  Polarity polarity = Polarity::Likes;
  std::string object;
  bool operator==(const PreferenceStatement&) const = default;
};

struct TestimonyStatement {
  DeonticEvaluation evaluation = DeonticEvaluation::Optional;
  InfoScope scope;
  bool operator==(const TestimonyStatement&) const = default;
};

struct QuestionStatement {
  std::string person;
  Polarity polarity = Polarity::Likes;
  bool operator==(const QuestionStatement&) const = default;
};

struct SpeakerDirective {
  std::string name;
  bool operator==(const SpeakerDirective&) const = default;
};

using Statement = std::variant<PreferenceStatement, TestimonyStatement,
                               QuestionStatement, SpeakerDirective>;

/// Word <-> symbol table read from (surfaceForm <symbol> <word>) facts, with
/// the category/object split taken from which side of the isa facts a symbol
/// appears on.
class Vocabulary {
 public:
  static Vocabulary from_kb(const KnowledgeBase& kb, const std::string& mt);

  std::optional<std::string> symbol_for(const std::string& word) const;
  /// Falls back to the symbol itself when no surface form is declared.
  std::string word_for(const std::string& symbol) const;
  bool is_category(const std::string& symbol) const;
  bool is_object(const std::string& symbol) const;
  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<std::string>& categories() const { return categories_; }

 private:
  std::map<std::string, std::string> word_to_symbol_;
  std::map<std::string, std::string> symbol_to_word_;
  std::vector<std::string> objects_;
  std::vector<std::string> categories_;
  bool known(const std::string& symbol) const;
};

/// Parses one line of the constrained language:
///   I (like|dislike) <object>.
///   You (may|must) share my (preferences|likes|dislikes)
///     [about <topic>] [with <person>].
///   Do not share my (preferences|likes|dislikes) [about <topic>] [with <person>].
///   What does <person> (like|dislike)?
///   #speaker: <name>
/// Throws ParseError on shape errors and VocabularyError on unknown words.
Statement parse_statement(const std::string& line, const Vocabulary& v);

/// Canonical sentence for a statement; parse_statement round-trips it.
std::string render_statement(const Statement& st, const Vocabulary& v);

/// Behavior template asserted by testimony with this scope: a sharing event
/// variable constrained by owner, topic, polarity, and hearer literals.
Conjunction scope_behavior(const InfoScope& scope, const std::string& owner);

/// Ground sharing act (up to the event variable): one object, one polarity,
/// one hearer.
Conjunction sharing_act(const std::string& owner, const std::string& object,
                        Polarity polarity, const std::string& hearer);

/// Norm frame a testimony statement contributes (context is unconditional).
NormFrame testimony_frame(const TestimonyStatement& st, const std::string& owner);

enum class ResponseKind { LikesAnswer, DislikesAnswer, Unknown, Refusal, Ack };
std::string to_string(ResponseKind k);

struct Response {
  ResponseKind kind = ResponseKind::Ack;
  std::string text;
  std::optional<std::string> person;  // answer subject, when present
  std::optional<std::string> object;  // answer object symbol, when present
  bool operator==(const Response&) const = default;
};

struct SessionConfig {
  ClosureAssumption closure = ClosureAssumption::Prohibitive;
  int depth_limit = KnowledgeBase::kDefaultDepthLimit;
  /// Re-prove the norm check on every executed plan's final grounding.
  bool recheck_guard = false;
  std::string taxonomy_text;  // empty: built-in taxonomy
  std::string methods_text;   // empty: built-in methods
  std::string taxonomy_mt = "TaxonomyMt";
};

/// The built-in taxonomy: drinks, foods, academic topics, their instances,
/// and surface forms.
std::string default_taxonomy_text();

/// One conversation: a shared knowledge base, one microtheory and norm store
/// per person, and a speaker cursor.  Preferences become facts in the
/// speaker's microtheory, testimony becomes norm frames in the speaker's
/// store, and questions go through the planner so the norm check gates every
/// answer.
class Session {
 public:
  explicit Session(SessionConfig cfg = {});

  const SessionConfig& config() const { return cfg_; }
  KnowledgeBase& kb() { return kb_; }
  const KnowledgeBase& kb() const { return kb_; }
  std::map<std::string, NormStore>& stores() { return stores_; }
  const std::map<std::string, NormStore>& stores() const { return stores_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const Planner& planner() const { return planner_; }

  const std::string& speaker() const { return speaker_; }
  void set_speaker(const std::string& name);

  Statement parse(const std::string& line) const;
  Response submit(const std::string& line);
  Response apply(const Statement& st);

  /// Planner outcome of the most recent question, for explanation output.
  const std::optional<PlanOutcome>& last_outcome() const { return last_outcome_; }
  int guard_violations() const { return guard_violations_; }
  /// (input line, response text) pairs, replayable as a script.
  const std::vector<std::pair<std::string, std::string>>& transcript() const {
    return transcript_;
  }
  /// One line per stored norm frame, for inspection.
  std::vector<std::string> norm_summary() const;

  void ensure_person(const std::string& name);

 private:
  Response answer_question(const QuestionStatement& q);
  std::vector<Term> candidate_pool(const std::string& owner) const;

  SessionConfig cfg_;
  KnowledgeBase kb_;
  Vocabulary vocab_;
  Planner planner_;
  std::map<std::string, NormStore> stores_;
  std::string speaker_ = "User";
  int discourse_count_ = 0;
  std::optional<PlanOutcome> last_outcome_;
  std::vector<std::pair<std::string, std::string>> transcript_;
  int guard_violations_ = 0;
};

/// Feeds every nonblank, noncomment line to the session; '#speaker' lines are
/// statements, other '#' lines are comments.
std::vector<Response> run_script(Session& session, std::string_view text);

}  // namespace normguard
