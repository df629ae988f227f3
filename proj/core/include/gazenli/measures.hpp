#pragma once

#include <string>
#include <vector>

#include "gazenli/corpus.hpp"

namespace gazenli {

/// The three word-level fixation duration measures, in milliseconds.
///   ff: duration of the first fixation on the word.
///   fp: first pass - time from first entering the word to first leaving it,
///       including immediate refixations within the word.
///   tf: total of all fixations on the word.
/// All zero iff the word was never fixated; 0 <= ff <= fp <= tf always.
struct WordMeasures {
  double ff = 0.0;
  double fp = 0.0;
  double tf = 0.0;
};

enum class Metric { kFirstFixation, kFirstPass, kTotalFixation };

inline constexpr Metric kAllMetrics[] = {
    Metric::kFirstFixation, Metric::kFirstPass, Metric::kTotalFixation};

const char* to_string(Metric m);        // "ff" / "fp" / "tf"
Metric metric_from_string(const std::string& s);

double pick(const WordMeasures& m, Metric metric);

/// Per-token measures for one trial. Words the trial never fixates get
/// (0,0,0). Throws IntegrityError if an event's word index is out of range.
std::vector<WordMeasures> word_measures(const Trial& trial,
                                        std::size_t sentence_length);

/// All length-k windows of a sentence with n tokens: starts 0..n-k, never
/// crossing the sentence boundary. Empty when k > n.
struct Window {
  std::size_t start = 0;
  std::size_t k = 1;
};
std::vector<Window> enumerate_sequences(const AnnotatedSentence& sentence,
                                        std::size_t k);

/// Sum of the selected metric over tokens start..start+k-1.
/// Throws IntegrityError when the window leaves the sentence.
double sequence_measure(const std::vector<WordMeasures>& measures,
                        std::size_t start, std::size_t k, Metric metric);

}  // namespace gazenli
