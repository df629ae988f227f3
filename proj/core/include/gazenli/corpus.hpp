#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gazenli {

struct AnnotatedToken {
  std::string surface;    // non-empty, no whitespace
  std::string ptb_pos;    // PTB part-of-speech tag
  std::string upos;       // universal part-of-speech tag
  std::string dep_label;  // dependency relation label
  std::size_t char_length = 0;  // code points in surface

  bool operator==(const AnnotatedToken&) const = default;
};

struct AnnotatedSentence {
  std::string sentence_id;
  std::vector<AnnotatedToken> tokens;  // index == token_index

  /// Characters of the detokenized sentence: token lengths plus single
  /// spaces between tokens.
  std::size_t display_length() const;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct FixationEvent {
  std::size_t event_index = 0;  // temporal order within the trial, dense 0..m-1
  std::size_t word_index = 0;   // token index in the trial's sentence
  double duration_ms = 0.0;     // positive; integer-valued when file-backed

  bool operator==(const FixationEvent&) const = default;
};

/// One subject reading one sentence. May be empty (sentence skimmed with
/// no recorded fixation).
struct Trial {
  std::string subject_id;
  std::string sentence_id;
  std::vector<FixationEvent> events;  // sorted by event_index

  bool operator==(const Trial&) const = default;
};

struct SubjectRecord {
  std::string subject_id;
  std::string native_language;
  std::optional<int> english_score;  // 0..50 when present

  bool operator==(const SubjectRecord&) const = default;
};

enum class Regime { kShared, kIndividual };

const char* to_string(Regime r);

struct Dataset {
  std::map<std::string, AnnotatedSentence> sentences;  // keyed by sentence_id
  std::vector<Trial> trials;            // sorted by (subject_id, sentence_id)
  std::vector<SubjectRecord> subjects;  // sorted by subject_id
  Regime regime = Regime::kShared;

  const AnnotatedSentence& sentence(const std::string& id) const;
  const SubjectRecord* find_subject(const std::string& id) const;

  bool operator==(const Dataset&) const = default;
};

/// Typology feature table before imputation; cells may be missing.
struct TypologyTable {
  std::vector<std::string> languages;
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::optional<double>>> values;  // languages x features

  std::size_t missing_count() const;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// --- Parsers -------------------------------------------------------------
//
// All files are UTF-8, tab-separated, with a mandatory header row. Rows may
// appear in any order; the index columns define the canonical order, and the
// parsers return canonically sorted structures.

/// sentences.tsv: sentence_id, token_index, token, ptb_pos, upos, dep_label
std::map<std::string, AnnotatedSentence> parse_sentences(const std::string& path);

/// fixations.tsv: subject_id, sentence_id, event_index, word_index, duration_ms
std::vector<Trial> parse_fixation_log(const std::string& path);

/// subjects.tsv: subject_id, native_language, english_score (may be empty)
std::vector<SubjectRecord> parse_subjects(const std::string& path);

/// typology.tsv: first column "language", remaining columns feature names;
/// empty cells mark missing values.
TypologyTable parse_typology(const std::string& path);

// --- Writers (inverse of the parsers, canonical order) --------------------

void write_sentences(const std::string& path,
                     const std::map<std::string, AnnotatedSentence>& sentences);

/// Durations are rounded to the nearest positive integer millisecond; the
/// on-disk format is integral even when the in-memory dataset is not.
void write_fixations(const std::string& path, const std::vector<Trial>& trials);

void write_subjects(const std::string& path,
                    const std::vector<SubjectRecord>& subjects);

void write_typology(const std::string& path, const TypologyTable& table);

/// Writes sentences.tsv, fixations.tsv, subjects.tsv under `dir`.
void write_dataset(const std::string& dir, const Dataset& d);

/// Reads the three standard files under `dir`. The regime is inferred when
/// `regime` is not given: shared iff every subject's trial set covers the
/// identical sentence-id set.
Dataset read_dataset(const std::string& dir,
                     std::optional<Regime> regime = std::nullopt);

Regime infer_regime(const std::vector<Trial>& trials);

// --- Validation ------------------------------------------------------------

/// Cross-file consistency check. Never throws for data findings; every
/// finding names the offending identifier(s). Errors: referential breaks,
/// word indices past the sentence end, duplicate (subject, sentence) trials,
/// shared-regime sentence-set mismatches. Warnings: sentences over 100
/// display characters, subjects with zero recorded fixations.
ValidationReport validate_dataset(const Dataset& d);

}  // namespace gazenli
