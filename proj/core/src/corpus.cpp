#include "gazenli/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "gazenli/errors.hpp"
#include "gazenli/tsv.hpp"

namespace gazenli {

namespace {

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

long long round_duration(double ms) {
  long long v = static_cast<long long>(std::llround(ms));
  return v < 1 ? 1 : v;
}

}  // namespace

const char* to_string(Regime r) {
  return r == Regime::kShared ? "shared" : "individual";
}

std::size_t AnnotatedSentence::display_length() const {
  std::size_t n = 0;
  for (const auto& t : tokens) n += t.char_length;
  if (!tokens.empty()) n += tokens.size() - 1;
  return n;
}

const AnnotatedSentence& Dataset::sentence(const std::string& id) const {
  auto it = sentences.find(id);
  if (it == sentences.end()) {
    throw IntegrityError("unknown sentence_id '" + id + "'");
  }
  return it->second;
}

const SubjectRecord* Dataset::find_subject(const std::string& id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == id) return &s;
  }
  return nullptr;
}

std::size_t TypologyTable::missing_count() const {
  std::size_t n = 0;
  for (const auto& row : values) {
    for (const auto& cell : row) {
      if (!cell.has_value()) ++n;
    }
  }
  return n;
}

std::map<std::string, AnnotatedSentence> parse_sentences(const std::string& path) {
  static const std::vector<std::string> kHeader = {
      "sentence_id", "token_index", "token", "ptb_pos", "upos", "dep_label"};
  auto rows = tsv::read_file(path, kHeader);

  // sentence -> token_index -> token
  std::map<std::string, std::map<std::size_t, AnnotatedToken>> grouped;
  for (const auto& row : rows) {
    const std::string& sid = row.cells[0];
    if (sid.empty()) throw ParseError("empty sentence_id", row.line);
    long long idx = tsv::parse_int(row.cells[1], row.line, "token_index");
    if (idx < 0) throw ParseError("negative token_index", row.line);

    AnnotatedToken tok;
    tok.surface = row.cells[2];
    tok.ptb_pos = row.cells[3];
    tok.upos = row.cells[4];
    tok.dep_label = row.cells[5];
    if (tok.surface.empty() || has_whitespace(tok.surface)) {
      throw ParseError("token must be non-empty without whitespace: '" +
                           tok.surface + "'",
                       row.line);
    }
    tok.char_length = tsv::utf8_length(tok.surface);

    auto [it, inserted] =
        grouped[sid].emplace(static_cast<std::size_t>(idx), std::move(tok));
    if (!inserted) {
      throw IntegrityError("duplicate token (" + sid + ", " +
                           std::to_string(idx) + ") in " + path);
    }
  }

  std::map<std::string, AnnotatedSentence> out;
  for (auto& [sid, toks] : grouped) {
    AnnotatedSentence s;
    s.sentence_id = sid;
    std::size_t expect = 0;
    for (auto& [idx, tok] : toks) {
      if (idx != expect) {
        throw IntegrityError("gap in token_index for sentence '" + sid +
                             "': expected " + std::to_string(expect) +
                             ", found " + std::to_string(idx));
      }
      ++expect;
      s.tokens.push_back(std::move(tok));
    }
    out.emplace(sid, std::move(s));
  }
  return out;
}

std::vector<Trial> parse_fixation_log(const std::string& path) {
  static const std::vector<std::string> kHeader = {
      "subject_id", "sentence_id", "event_index", "word_index", "duration_ms"};
  auto rows = tsv::read_file(path, kHeader);

  std::map<std::pair<std::string, std::string>,
           std::map<std::size_t, FixationEvent>>
      grouped;
  for (const auto& row : rows) {
    const std::string& subj = row.cells[0];
    const std::string& sent = row.cells[1];
    if (subj.empty() || sent.empty()) {
      throw ParseError("empty subject_id or sentence_id", row.line);
    }
    long long ev = tsv::parse_int(row.cells[2], row.line, "event_index");
    long long w = tsv::parse_int(row.cells[3], row.line, "word_index");
    long long dur = tsv::parse_int(row.cells[4], row.line, "duration_ms");
    if (ev < 0 || w < 0) throw ParseError("negative index", row.line);
    if (dur <= 0) {
      throw IntegrityError("non-positive duration_ms for (" + subj + ", " +
                           sent + ", event " + std::to_string(ev) + ")");
    }

    FixationEvent e;
    e.event_index = static_cast<std::size_t>(ev);
    e.word_index = static_cast<std::size_t>(w);
    e.duration_ms = static_cast<double>(dur);
    auto [it, inserted] = grouped[{subj, sent}].emplace(e.event_index, e);
    if (!inserted) {
      throw IntegrityError("duplicate event_index " + std::to_string(ev) +
                           " in trial (" + subj + ", " + sent + ")");
    }
  }

  std::vector<Trial> out;
  out.reserve(grouped.size());
  for (auto& [key, events] : grouped) {
    Trial t;
    t.subject_id = key.first;
    t.sentence_id = key.second;
    std::size_t expect = 0;
    for (auto& [idx, ev] : events) {
      if (idx != expect) {
        throw IntegrityError("gap in event_index for trial (" + t.subject_id +
                             ", " + t.sentence_id + "): expected " +
                             std::to_string(expect) + ", found " +
                             std::to_string(idx));
      }
      ++expect;
      t.events.push_back(ev);
    }
    out.push_back(std::move(t));
  }
  return out;  // map iteration is already (subject_id, sentence_id) sorted
}

std::vector<SubjectRecord> parse_subjects(const std::string& path) {
  static const std::vector<std::string> kHeader = {"subject_id",
                                                   "native_language",
                                                   "english_score"};
  auto rows = tsv::read_file(path, kHeader);

  std::vector<SubjectRecord> out;
  std::set<std::string> seen;
  for (const auto& row : rows) {
    SubjectRecord r;
    r.subject_id = row.cells[0];
    r.native_language = row.cells[1];
    if (r.subject_id.empty() || r.native_language.empty()) {
      throw ParseError("empty subject_id or native_language", row.line);
    }
    if (!seen.insert(r.subject_id).second) {
      throw IntegrityError("duplicate subject_id '" + r.subject_id + "'");
    }
    if (!row.cells[2].empty()) {
      long long score = tsv::parse_int(row.cells[2], row.line, "english_score");
      if (score < 0 || score > 50) {
        throw IntegrityError("english_score out of range 0..50 for '" +
                             r.subject_id + "'");
      }
      r.english_score = static_cast<int>(score);
    }
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.subject_id < b.subject_id;
  });
  return out;
}

TypologyTable parse_typology(const std::string& path) {
  tsv::RaggedFile f = tsv::read_file_any_header(path);
  if (f.header.empty() || f.header[0] != "language") {
    throw ParseError("first column of " + path + " must be 'language'", 1);
  }
  TypologyTable t;
  t.feature_names.assign(f.header.begin() + 1, f.header.end());

  std::set<std::string> seen;
  for (const auto& row : f.rows) {
    if (row.cells.size() != f.header.size()) {
      throw ParseError("ragged row: expected " +
                           std::to_string(f.header.size()) + " columns, got " +
                           std::to_string(row.cells.size()),
                       row.line);
    }
    const std::string& lang = row.cells[0];
    if (lang.empty()) throw ParseError("empty language", row.line);
    if (!seen.insert(lang).second) {
      throw IntegrityError("duplicate language row '" + lang + "'");
    }
    t.languages.push_back(lang);
    std::vector<std::optional<double>> vals;
    vals.reserve(t.feature_names.size());
    for (std::size_t i = 1; i < row.cells.size(); ++i) {
      if (row.cells[i].empty()) {
        vals.push_back(std::nullopt);
      } else {
        vals.push_back(tsv::parse_real(row.cells[i], row.line,
                                       t.feature_names[i - 1]));
      }
    }
    t.values.push_back(std::move(vals));
  }
  return t;
}

void write_sentences(const std::string& path,
                     const std::map<std::string, AnnotatedSentence>& sentences) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [sid, s] : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto& t = s.tokens[i];
      rows.push_back({sid, std::to_string(i), t.surface, t.ptb_pos, t.upos,
                      t.dep_label});
    }
  }
  tsv::write_file(path,
                  {"sentence_id", "token_index", "token", "ptb_pos", "upos",
                   "dep_label"},
                  rows);
}

void write_fixations(const std::string& path, const std::vector<Trial>& trials) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : trials) {
    for (const auto& e : t.events) {
      rows.push_back({t.subject_id, t.sentence_id,
                      std::to_string(e.event_index),
                      std::to_string(e.word_index),
                      std::to_string(round_duration(e.duration_ms))});
    }
  }
  tsv::write_file(
      path,
      {"subject_id", "sentence_id", "event_index", "word_index", "duration_ms"},
      rows);
}

void write_subjects(const std::string& path,
                    const std::vector<SubjectRecord>& subjects) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : subjects) {
    rows.push_back({s.subject_id, s.native_language,
                    s.english_score ? std::to_string(*s.english_score) : ""});
  }
  tsv::write_file(path, {"subject_id", "native_language", "english_score"},
                  rows);
}

void write_typology(const std::string& path, const TypologyTable& table) {
  std::vector<std::string> header = {"language"};
  header.insert(header.end(), table.feature_names.begin(),
                table.feature_names.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.languages.size(); ++i) {
    std::vector<std::string> row = {table.languages[i]};
    for (const auto& cell : table.values[i]) {
      row.push_back(cell ? tsv::format_full(*cell) : "");
    }
    rows.push_back(std::move(row));
  }
  tsv::write_file(path, header, rows);
}

void write_dataset(const std::string& dir, const Dataset& d) {
  write_sentences(dir + "/sentences.tsv", d.sentences);
  write_fixations(dir + "/fixations.tsv", d.trials);
  write_subjects(dir + "/subjects.tsv", d.subjects);
}

Regime infer_regime(const std::vector<Trial>& trials) {
  std::map<std::string, std::set<std::string>> per_subject;
  for (const auto& t : trials) per_subject[t.subject_id].insert(t.sentence_id);
  const std::set<std::string>* first = nullptr;
  for (const auto& [subj, sents] : per_subject) {
    if (!first) {
      first = &sents;
    } else if (sents != *first) {
      return Regime::kIndividual;
    }
  }
  return Regime::kShared;
}

Dataset read_dataset(const std::string& dir, std::optional<Regime> regime) {
  Dataset d;
  d.sentences = parse_sentences(dir + "/sentences.tsv");
  d.trials = parse_fixation_log(dir + "/fixations.tsv");
  d.subjects = parse_subjects(dir + "/subjects.tsv");
  d.regime = regime ? *regime : infer_regime(d.trials);
  return d;
}

ValidationReport validate_dataset(const Dataset& d) {
  ValidationReport report;
  auto error = [&report](std::string msg) {
    report.errors.push_back(std::move(msg));
  };
  auto warn = [&report](std::string msg) {
    report.warnings.push_back(std::move(msg));
  };

  std::set<std::string> subject_ids;
  for (const auto& s : d.subjects) {
    if (!subject_ids.insert(s.subject_id).second) {
      error("duplicate subject_id '" + s.subject_id + "'");
    }
  }

  for (const auto& [sid, s] : d.sentences) {
    if (s.tokens.empty()) error("sentence '" + sid + "' has no tokens");
    if (s.display_length() > 100) {
      warn("sentence '" + sid + "' exceeds 100 characters (" +
           std::to_string(s.display_length()) + ")");
    }
  }

  std::set<std::pair<std::string, std::string>> trial_keys;
  std::map<std::string, std::set<std::string>> sentences_of;
  std::map<std::string, std::size_t> fixations_of;
  for (const auto& s : d.subjects) fixations_of[s.subject_id] = 0;

  for (const auto& t : d.trials) {
    if (!trial_keys.insert({t.subject_id, t.sentence_id}).second) {
      error("duplicate trial (" + t.subject_id + ", " + t.sentence_id + ")");
    }
    if (!subject_ids.count(t.subject_id)) {
      error("trial references unknown subject_id '" + t.subject_id + "'");
    }
    auto sent = d.sentences.find(t.sentence_id);
    if (sent == d.sentences.end()) {
      error("trial (" + t.subject_id + ") references unknown sentence_id '" +
            t.sentence_id + "'");
    }
    sentences_of[t.subject_id].insert(t.sentence_id);
    std::size_t expect = 0;
    for (const auto& e : t.events) {
      if (e.event_index != expect++) {
        error("non-dense event_index in trial (" + t.subject_id + ", " +
              t.sentence_id + ")");
        break;
      }
    }
    for (const auto& e : t.events) {
      if (e.duration_ms <= 0) {
        error("non-positive duration in trial (" + t.subject_id + ", " +
              t.sentence_id + ")");
      }
      if (sent != d.sentences.end() &&
          e.word_index >= sent->second.tokens.size()) {
        error("word_index " + std::to_string(e.word_index) +
              " out of range in trial (" + t.subject_id + ", " +
              t.sentence_id + ")");
      }
    }
    fixations_of[t.subject_id] += t.events.size();
  }

  if (d.regime == Regime::kShared) {
    std::set<std::string> all;
    for (const auto& [subj, sents] : sentences_of) {
      all.insert(sents.begin(), sents.end());
    }
    for (const auto& s : d.subjects) {
      const auto& sents = sentences_of[s.subject_id];
      if (sents != all) {
        std::size_t missing = 0;
        std::string example;
        for (const auto& sid : all) {
          if (!sents.count(sid)) {
            ++missing;
            if (example.empty()) example = sid;
          }
        }
        error("shared regime: subject '" + s.subject_id + "' is missing " +
              std::to_string(missing) + " sentence(s), e.g. '" + example + "'");
      }
    }
  }

  for (const auto& [subj, n] : fixations_of) {
    if (n == 0) warn("subject '" + subj + "' has zero recorded fixations");
  }

  return report;
}

}  // namespace gazenli
