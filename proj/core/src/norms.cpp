#include "normguard/norms.hpp"

#include <algorithm>

namespace normguard {

NormClass norm_class(DeonticEvaluation e) {
  return e == DeonticEvaluation::Impermissible ? NormClass::Prohibition
                                               : NormClass::Permission;
}

std::string to_string(DeonticEvaluation e) {
  switch (e) {
    case DeonticEvaluation::Obligatory: return "Obligatory";
    case DeonticEvaluation::Optional: return "Optional";
    case DeonticEvaluation::Impermissible: return "Impermissible";
  }
  return "?";
}

std::string to_string(NormClass c) {
  return c == NormClass::Permission ? "Permission" : "Prohibition";
}

std::optional<DeonticEvaluation> evaluation_from_string(const std::string& s) {
  if (s == "Obligatory") return DeonticEvaluation::Obligatory;
  if (s == "Optional") return DeonticEvaluation::Optional;
  if (s == "Impermissible") return DeonticEvaluation::Impermissible;
  return std::nullopt;
}

std::string to_string(const NormFrame& f) {
  return "(norm " + f.id + " :context " + to_string(f.context) + " :behavior " +
         to_string(f.behavior) + " :evaluation " + to_string(f.evaluation) + ")";
}

bool norm_prior_to_norm(const NormFrame& a, const NormFrame& b) {
  return a.timestamp < b.timestamp;
}

namespace {

// Negation must stay at the meta level; a frame that smuggles it into its
// literals would silently change the calculus' semantics.
void check_frame_literals(const Conjunction& c, const std::string& what) {
  for (const Literal& l : c.literals) {
    if (l.predicate == "naf" || l.predicate == "not" || l.predicate == "uninferredSentence")
      throw StoreError(what + " must contain positive literals only, got (" +
                       l.predicate + " ...)");
  }
}

}  // namespace

const NormFrame& NormStore::add_testimony(NormFrame frame) {
  if (frame.id.empty()) frame.id = "norm" + std::to_string(clock_ + 1);
  for (const NormFrame& f : frames_)
    if (f.id == frame.id) throw StoreError("duplicate norm id: " + frame.id);
  check_frame_literals(frame.behavior, "behavior of " + frame.id);
  check_frame_literals(frame.context, "context of " + frame.id);
  if (frame.owner.empty()) frame.owner = owner_;
  frame.timestamp = ++clock_;
  frames_.push_back(std::move(frame));
  return frames_.back();
}

const NormFrame* NormStore::find(const std::string& id) const {
  for (const NormFrame& f : frames_)
    if (f.id == id) return &f;
  return nullptr;
}

// ── frame-level entailment relations ─────────────────────────────────────

Trilean active_in(const KnowledgeBase& kb, const std::string& mt, const NormFrame& frame,
                  const Conjunction& situation, const EntailOptions& options) {
  return entails(kb, mt, situation, frame.context, options);
}

Trilean on_application_grounds(const KnowledgeBase& kb, const std::string& mt,
                               const Conjunction& b, const NormFrame& frame,
                               const EntailOptions& options) {
  return entails(kb, mt, b, frame.behavior, options);
}

std::string to_string(SubsumeKind k) {
  switch (k) {
    case SubsumeKind::No: return "No";
    case SubsumeKind::Strict: return "Strict";
    case SubsumeKind::Mutual: return "Mutual";
  }
  return "?";
}

SubsumeKind subsumes(const KnowledgeBase& kb, const std::string& mt, const NormFrame& a,
                     const NormFrame& b, const EntailOptions& options) {
  bool b_in_a = definite(entails(kb, mt, b.behavior, a.behavior, options),
                         "subsumption of " + b.id + " by " + a.id);
  if (!b_in_a) return SubsumeKind::No;
  bool a_in_b = definite(entails(kb, mt, a.behavior, b.behavior, options),
                         "subsumption of " + a.id + " by " + b.id);
  return a_in_b ? SubsumeKind::Mutual : SubsumeKind::Strict;
}

std::string to_string(ConflictType t) {
  switch (t) {
    case ConflictType::Direct: return "Direct";
    case ConflictType::Indirect: return "Indirect";
    case ConflictType::Intersecting: return "Intersecting";
  }
  return "?";
}

std::optional<ConflictType> conflict_type_from_string(const std::string& s) {
  if (s == "Direct") return ConflictType::Direct;
  if (s == "Indirect") return ConflictType::Indirect;
  if (s == "Intersecting") return ConflictType::Intersecting;
  return std::nullopt;
}

std::optional<ConflictType> classify_conflict(const KnowledgeBase& kb,
                                              const std::string& mt, const NormFrame& a,
                                              const NormFrame& b,
                                              const EntailOptions& options) {
  if (a.norm_class() == b.norm_class()) return std::nullopt;
  bool a_in_b = definite(entails(kb, mt, a.behavior, b.behavior, options),
                         "conflict class of " + a.id + "/" + b.id);
  bool b_in_a = definite(entails(kb, mt, b.behavior, a.behavior, options),
                         "conflict class of " + a.id + "/" + b.id);
  if (a_in_b && b_in_a) return ConflictType::Direct;
  if (a_in_b || b_in_a) return ConflictType::Indirect;
  return ConflictType::Intersecting;
}

// ── textual format ───────────────────────────────────────────────────────

void load_norm_text(NormStore& store, std::string_view text) {
  for (const SExpr& form : parse_sexprs(text)) {
    if (!form.is_list() || form.head() != "norm")
      throw ParseError("expected (norm <id> :context ... :behavior ... :evaluation ...)",
                       form.pos);
    if (form.items.size() < 2 || !form.items[1].is_symbol())
      throw ParseError("norm form needs an id", form.pos);
    NormFrame f;
    f.id = form.items[1].symbol;
    for (std::size_t i = 2; i + 1 < form.items.size(); i += 2) {
      const SExpr& key = form.items[i];
      const SExpr& value = form.items[i + 1];
      if (!key.is_symbol()) throw ParseError("expected a :keyword", key.pos);
      if (key.symbol == ":context") {
        f.context = conjunction_from_sexpr(value);
      } else if (key.symbol == ":behavior") {
        f.behavior = conjunction_from_sexpr(value);
      } else if (key.symbol == ":evaluation") {
        if (!value.is_symbol()) throw ParseError("expected an evaluation symbol", value.pos);
        auto e = evaluation_from_string(value.symbol);
        if (!e) throw ParseError("unknown evaluation: " + value.symbol, value.pos);
        f.evaluation = *e;
      } else {
        throw ParseError("unknown key in norm form: " + key.symbol, key.pos);
      }
    }
    if ((form.items.size() - 2) % 2 != 0)
      throw ParseError("norm form has a dangling key", form.pos);
    store.add_testimony(std::move(f));
  }
}

std::string save_norm_text(const NormStore& store) {
  std::string out;
  for (const NormFrame& f : store.frames()) out += to_string(f) + "\n";
  return out;
}

}  // namespace normguard
