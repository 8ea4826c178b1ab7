#pragma once

#include <cstdint>
#include <optional>

#include "normguard/entail.hpp"

namespace normguard {

enum class DeonticEvaluation { Obligatory, Optional, Impermissible };

/// Obligatory and Optional behaviors are both permitted; Impermissible marks
/// a prohibition.
enum class NormClass { Permission, Prohibition };

NormClass norm_class(DeonticEvaluation e);
std::string to_string(DeonticEvaluation e);
std::string to_string(NormClass c);
std::optional<DeonticEvaluation> evaluation_from_string(const std::string& s);

/// One piece of normative testimony, interpreted inside `owner`'s
/// microtheory.  `timestamp` is a logical clock stamped by the store; later
/// testimony can defeat earlier testimony.
struct NormFrame {
  std::string id;
  std::string owner;         // microtheory the frame is true in
  Conjunction context;       // when the norm is active; (and) = always
  Conjunction behavior;      // what the norm regulates (positive literals)
  DeonticEvaluation evaluation = DeonticEvaluation::Optional;
  std::uint64_t timestamp = 0;

  NormClass norm_class() const { return normguard::norm_class(evaluation); }
  bool operator==(const NormFrame&) const = default;
};

std::string to_string(const NormFrame& f);

/// Was a stated strictly before b?  Frames never share a timestamp within a
/// store, and a frame is never prior to itself.
bool norm_prior_to_norm(const NormFrame& a, const NormFrame& b);

/// Per-agent frame store with one logical clock.  Frames are kept in
/// ascending timestamp order; restating testimony yields a fresh, later frame
/// rather than touching the old one.
class NormStore {
 public:
  NormStore() = default;
  explicit NormStore(std::string owner) : owner_(std::move(owner)) {}

  const std::string& owner() const { return owner_; }

  /// Stamps and stores a frame.  The frame's timestamp field is ignored on
  /// input.  Rejects duplicate ids, reserved predicates, and negation smuggled
  /// into context/behavior literals.
  const NormFrame& add_testimony(NormFrame frame);

  const std::vector<NormFrame>& frames() const { return frames_; }
  const NormFrame* find(const std::string& id) const;
  bool empty() const { return frames_.empty(); }

 private:
  std::string owner_;
  std::vector<NormFrame> frames_;
  std::uint64_t clock_ = 0;
};

// ── frame-level entailment relations ─────────────────────────────────────

/// Is the frame's context met in `situation`?
Trilean active_in(const KnowledgeBase& kb, const std::string& mt, const NormFrame& frame,
                  const Conjunction& situation, const EntailOptions& options = {});

/// Does behavior b fall on the frame's application grounds?
Trilean on_application_grounds(const KnowledgeBase& kb, const std::string& mt,
                               const Conjunction& b, const NormFrame& frame,
                               const EntailOptions& options = {});

enum class SubsumeKind { No, Strict, Mutual };
std::string to_string(SubsumeKind k);

/// Does a subsume b?  a subsumes b when b's behavior entails a's, i.e. every
/// act on b's grounds is on a's.  Strict when not mutual.  Throws
/// IndeterminateError when the underlying proofs run out of depth.
SubsumeKind subsumes(const KnowledgeBase& kb, const std::string& mt, const NormFrame& a,
                     const NormFrame& b, const EntailOptions& options = {});

enum class ConflictType { Direct, Indirect, Intersecting };
std::string to_string(ConflictType t);
std::optional<ConflictType> conflict_type_from_string(const std::string& s);

/// Classifies the conflict between a permission-class frame and a
/// prohibition, or nullopt when the evaluations are compatible (same class).
/// Direct: equivalent behaviors.  Indirect: one strictly subsumes the other.
/// Intersecting: neither subsumes; any two behaviors meet at least trivially,
/// so a certifying caller should also verify a nontrivial shared witness via
/// intersect_witness.
std::optional<ConflictType> classify_conflict(const KnowledgeBase& kb,
                                              const std::string& mt, const NormFrame& a,
                                              const NormFrame& b,
                                              const EntailOptions& options = {});

// ── textual format ───────────────────────────────────────────────────────

/// Norm files hold forms like:
///   (norm <id> :context (and ...) :behavior (and ...) :evaluation Optional)
/// Frames are stamped in file order.
void load_norm_text(NormStore& store, std::string_view text);
std::string save_norm_text(const NormStore& store);

}  // namespace normguard
