#include "gazenli/measures.hpp"

#include "gazenli/errors.hpp"

namespace gazenli {

const char* to_string(Metric m) {
  switch (m) {
    case Metric::kFirstFixation: return "ff";
    case Metric::kFirstPass: return "fp";
    case Metric::kTotalFixation: return "tf";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  if (s == "ff") return Metric::kFirstFixation;
  if (s == "fp") return Metric::kFirstPass;
  if (s == "tf") return Metric::kTotalFixation;
  throw ConfigError("unknown metric '" + s + "' (expected ff, fp or tf)");
}

double pick(const WordMeasures& m, Metric metric) {
  switch (metric) {
    case Metric::kFirstFixation: return m.ff;
    case Metric::kFirstPass: return m.fp;
    case Metric::kTotalFixation: return m.tf;
  }
  return 0.0;
}

std::vector<WordMeasures> word_measures(const Trial& trial,
                                        std::size_t sentence_length) {
  std::vector<WordMeasures> out(sentence_length);
  std::vector<bool> seen(sentence_length, false);

  for (std::size_t i = 0; i < trial.events.size(); ++i) {
    const FixationEvent& e = trial.events[i];
    if (e.word_index >= sentence_length) {
      throw IntegrityError("word_index " + std::to_string(e.word_index) +
                           " out of range for sentence of length " +
                           std::to_string(sentence_length) + " in trial (" +
                           trial.subject_id + ", " + trial.sentence_id + ")");
    }
    WordMeasures& m = out[e.word_index];
    m.tf += e.duration_ms;
    if (!seen[e.word_index]) {
      seen[e.word_index] = true;
      m.ff = e.duration_ms;
      // First pass: this event plus the run of immediately following events
      // on the same word, up to the first event anywhere else.
      m.fp = e.duration_ms;
      for (std::size_t j = i + 1; j < trial.events.size() &&
                                  trial.events[j].word_index == e.word_index;
           ++j) {
        m.fp += trial.events[j].duration_ms;
      }
    }
  }
  return out;
}

std::vector<Window> enumerate_sequences(const AnnotatedSentence& sentence,
                                        std::size_t k) {
  std::vector<Window> out;
  std::size_t n = sentence.tokens.size();
  if (k == 0 || k > n) return out;
  out.reserve(n - k + 1);
  for (std::size_t start = 0; start + k <= n; ++start) {
    out.push_back(Window{start, k});
  }
  return out;
}

double sequence_measure(const std::vector<WordMeasures>& measures,
                        std::size_t start, std::size_t k, Metric metric) {
  if (k == 0 || start + k > measures.size()) {
    throw IntegrityError("window [" + std::to_string(start) + ", " +
                         std::to_string(start + k) +
                         ") out of bounds for sentence of length " +
                         std::to_string(measures.size()));
  }
  double sum = 0.0;
  for (std::size_t i = start; i < start + k; ++i) {
    sum += pick(measures[i], metric);
  }
  return sum;
}

}  // namespace gazenli
