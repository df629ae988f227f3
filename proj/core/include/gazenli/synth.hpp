#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gazenli/corpus.hpp"
#include "gazenli/lingsim.hpp"

namespace gazenli {

/// Reading-time effect profile of one simulated native language: duration
/// multipliers by PTB tag and by word length. Unlisted keys multiply by 1.
struct LanguageEffect {
  std::string label;
  std::map<std::string, double> pos_multiplier;
  std::map<int, double> length_multiplier;
};

struct SynthConfig {
  std::vector<LanguageEffect> languages;
  int subjects_per_language = 36;
  int sentences = 78;           // per batch; shared batches are read by everyone
  int min_tokens = 8;
  int max_tokens = 14;
  double base_duration_ms = 220.0;
  double subject_speed_sigma = 0.2;  // log-normal spread of per-subject speed
  double noise_sigma = 0.15;         // log-normal per-event noise
  double refixation_prob = 0.15;
  double skip_prob = 0.10;
  Regime regime = Regime::kShared;
  std::uint64_t seed = 42;
};

/// Draws a dataset with the configured language-specific effects.
/// Deterministic given the seed; draw order is sentences, then subjects,
/// then events. Durations stay real-valued in memory so that scaling
/// base_duration_ms rescales them exactly; the file writers round to
/// integer milliseconds. Throws ConfigError on a degenerate config.
Dataset generate(const SynthConfig& config);

/// Ground-truth language similarity: cosine of the concatenated
/// (log pos-multiplier, log length-multiplier) effect vectors over the
/// union key set. Two all-neutral (zero) effect vectors count as identical
/// (similarity 1); a zero against a non-zero gives 0.
SimilarityMatrix planted_similarity(const SynthConfig& config);

/// Named ready-made configs:
///   "default"       four languages, two tight pairs, clear cross-pair gaps
///   "null"          the same four labels with identical (neutral) effects
///   "native-binary" a neutral English group plus a language reading
///                   determiners and pronouns at 0.7x speed
SynthConfig scenario(const std::string& name);
std::vector<std::string> scenario_names();

/// Human-readable record of the config and the planted similarity matrix.
std::string scenario_manifest(const SynthConfig& config);

}  // namespace gazenli
