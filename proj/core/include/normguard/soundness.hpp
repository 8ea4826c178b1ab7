#pragma once

#include "normguard/dialogue.hpp"

namespace normguard {

struct SoundnessOptions {
  int stores = 10000;          // random norm stores to generate
  int max_frames = 6;          // frames per store, uniform in [0, max]
  int probes_per_store = 12;   // (behavior, context) probes per store
  unsigned seed = 7;
  int jobs = 1;                // worker threads (stores are independent)
  int depth_limit = KnowledgeBase::kDefaultDepthLimit;
};

struct SoundnessViolation {
  int store_index = 0;
  std::string closure;
  std::string detail;
};

struct SoundnessResult {
  int stores_checked = 0;
  long long probes_checked = 0;  // judgment pairs examined
  std::vector<SoundnessViolation> violations;
  double seconds = 0.0;
  bool ok() const { return violations.empty(); }
};

/// Fuzzes random norm stores over the built-in taxonomy and checks that for
/// every probe and both closure assumptions, the permissibility and
/// impermissibility queries return the same verdict — never both affirmative.
SoundnessResult check_soundness(const SoundnessOptions& opts = {});

std::string soundness_to_json(const SoundnessResult& r);
std::string soundness_to_text(const SoundnessResult& r);

}  // namespace normguard
