#include "gazenli/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gazenli/errors.hpp"
#include "gazenli/tsv.hpp"

namespace gazenli {

const char* to_string(LabelKind k) {
  switch (k) {
    case LabelKind::kPtb: return "ptb";
    case LabelKind::kUpos: return "upos";
    case LabelKind::kDep: return "dep";
  }
  return "?";
}

LabelKind label_kind_from_string(const std::string& s) {
  if (s == "ptb") return LabelKind::kPtb;
  if (s == "upos") return LabelKind::kUpos;
  if (s == "dep") return LabelKind::kDep;
  throw ConfigError("unknown label kind '" + s + "' (expected ptb, upos or dep)");
}

FeatureMatrix FeatureMatrix::hconcat(const std::vector<FeatureMatrix>& parts) {
  if (parts.empty()) throw ConfigError("hconcat of zero matrices");
  FeatureMatrix out;
  out.subject_ids = parts[0].subject_ids;
  out.labels = parts[0].labels;
  for (const auto& p : parts) {
    if (p.subject_ids != out.subject_ids) {
      throw ShapeError("hconcat: subject rows do not match");
    }
    out.feature_names.insert(out.feature_names.end(), p.feature_names.begin(),
                             p.feature_names.end());
  }
  out.values.resize(out.rows() * out.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::size_t c = 0;
    for (const auto& p : parts) {
      for (std::size_t j = 0; j < p.cols(); ++j) {
        out.at(r, c++) = p.at(r, j);
      }
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(
    const std::vector<std::size_t>& idx) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  for (std::size_t r : idx) {
    out.subject_ids.push_back(subject_ids.at(r));
    out.labels.push_back(labels.at(r));
    out.values.insert(out.values.end(), row(r), row(r) + cols());
  }
  return out;
}

std::vector<std::size_t> FeatureMatrix::rows_with_labels(
    const std::vector<std::string>& keep) const {
  std::set<std::string> want(keep.begin(), keep.end());
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < rows(); ++r) {
    if (want.count(labels[r])) idx.push_back(r);
  }
  return idx;
}

double normalizer(const std::vector<double>& window_values) {
  if (window_values.empty()) {
    throw NormalizerError("normalizer undefined: empty scope");
  }
  double sum = 0.0;
  for (double v : window_values) sum += v;
  double s = sum / static_cast<double>(window_values.size());
  if (s <= 0.0) {
    throw NormalizerError("zero normalizer: no fixation time in scope");
  }
  return s;
}

double normalize(double value, double s) {
  if (s <= 0.0) throw NormalizerError("zero normalizer");
  return value / s;
}

namespace {

std::vector<Metric> canonical_metrics(const std::vector<Metric>& metrics) {
  std::vector<Metric> out;
  for (Metric m : kAllMetrics) {
    if (std::find(metrics.begin(), metrics.end(), m) != metrics.end()) {
      out.push_back(m);
    }
  }
  if (out.empty()) throw ConfigError("no metrics selected");
  return out;
}

std::vector<std::size_t> canonical_ks(const std::vector<std::size_t>& ks) {
  std::vector<std::size_t> out(ks);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw ConfigError("no n-gram orders selected");
  for (std::size_t k : out) {
    if (k < 1 || k > 3) {
      throw ConfigError("n-gram order " + std::to_string(k) +
                        " out of supported range 1..3");
    }
  }
  return out;
}

std::vector<LabelKind> canonical_kinds(const std::vector<LabelKind>& kinds) {
  std::vector<LabelKind> out;
  for (LabelKind k : kAllLabelKinds) {
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
      out.push_back(k);
    }
  }
  if (out.empty()) throw ConfigError("no label kinds selected");
  return out;
}

/// Trials of each subject, in the dataset's canonical subject order.
std::map<std::string, std::vector<const Trial*>> trials_by_subject(
    const Dataset& d) {
  std::map<std::string, std::vector<const Trial*>> out;
  for (const auto& s : d.subjects) out[s.subject_id];
  for (const auto& t : d.trials) {
    auto it = out.find(t.subject_id);
    if (it == out.end()) {
      throw IntegrityError("trial references unknown subject '" +
                           t.subject_id + "'");
    }
    it->second.push_back(&t);
  }
  return out;
}

}  // namespace

FeatureMatrix build_wfc(const Dataset& d, const FeatureOptions& opt) {
  if (d.regime != Regime::kShared) {
    throw RegimeError(
        "words-in-fixed-context features require the shared regime");
  }
  if (d.subjects.empty()) throw ConfigError("dataset has no subjects");
  const auto metrics = canonical_metrics(opt.metrics);
  const auto ks = canonical_ks(opt.ks);
  const auto per_subject = trials_by_subject(d);

  FeatureMatrix m;
  for (const auto& s : d.subjects) {
    m.subject_ids.push_back(s.subject_id);
    m.labels.push_back(s.native_language);
  }
  for (std::size_t k : ks) {
    for (const auto& [sid, sent] : d.sentences) {
      for (const auto& win : enumerate_sequences(sent, k)) {
        for (Metric metric : metrics) {
          m.feature_names.push_back("wfc:" + std::to_string(k) + ":" + sid +
                                    ":" + std::to_string(win.start) + "/" +
                                    to_string(metric));
        }
      }
    }
  }
  m.values.resize(m.rows() * m.cols());

  for (std::size_t r = 0; r < d.subjects.size(); ++r) {
    const auto& subj = d.subjects[r];
    std::map<std::string, std::vector<WordMeasures>> measures;
    for (const Trial* t : per_subject.at(subj.subject_id)) {
      measures[t->sentence_id] =
          word_measures(*t, d.sentence(t->sentence_id).tokens.size());
    }

    std::size_t c = 0;
    for (std::size_t k : ks) {
      for (const auto& [sid, sent] : d.sentences) {
        auto it = measures.find(sid);
        if (it == measures.end()) {
          throw IntegrityError("shared regime: subject '" + subj.subject_id +
                               "' has no trial for sentence '" + sid + "'");
        }
        const auto windows = enumerate_sequences(sent, k);
        // Sentence-scoped normalizer per (metric, k).
        std::vector<std::vector<double>> window_values(metrics.size());
        for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
          window_values[mi].reserve(windows.size());
          for (const auto& win : windows) {
            window_values[mi].push_back(
                sequence_measure(it->second, win.start, k, metrics[mi]));
          }
        }
        std::vector<double> scale(metrics.size());
        for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
          try {
            scale[mi] = normalizer(window_values[mi]);
          } catch (const NormalizerError&) {
            throw NormalizerError(
                "zero normalizer for subject '" + subj.subject_id +
                "', sentence '" + sid + "', metric " +
                to_string(metrics[mi]) + ", k=" + std::to_string(k));
          }
        }
        for (std::size_t wi = 0; wi < windows.size(); ++wi) {
          for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
            m.at(r, c++) = window_values[mi][wi] / scale[mi];
          }
        }
      }
    }
  }
  return m;
}

FeatureMatrix build_cluster_features(const Dataset& d, const std::string& kind,
                                     const TokenKeyFn& key,
                                     const FeatureOptions& opt) {
  if (d.subjects.empty()) throw ConfigError("dataset has no subjects");
  const auto metrics = canonical_metrics(opt.metrics);
  const auto ks = canonical_ks(opt.ks);
  const auto per_subject = trials_by_subject(d);

  auto window_key = [&](const AnnotatedSentence& sent, std::size_t start,
                        std::size_t k) {
    std::string out;
    for (std::size_t i = 0; i < k; ++i) {
      if (i) out += '_';
      out += key(sent, start + i);
    }
    return out;
  };

  // Common support: keys present in every subject's reading input. The
  // vocabulary depends only on stimuli and annotations, never on gaze.
  std::map<std::size_t, std::set<std::string>> vocabulary;
  bool first_subject = true;
  for (const auto& subj : d.subjects) {
    std::map<std::size_t, std::set<std::string>> mine;
    for (const Trial* t : per_subject.at(subj.subject_id)) {
      const auto& sent = d.sentence(t->sentence_id);
      for (std::size_t k : ks) {
        for (const auto& win : enumerate_sequences(sent, k)) {
          mine[k].insert(window_key(sent, win.start, k));
        }
      }
    }
    if (first_subject) {
      vocabulary = std::move(mine);
      first_subject = false;
    } else {
      for (std::size_t k : ks) {
        std::set<std::string> kept;
        std::set_intersection(vocabulary[k].begin(), vocabulary[k].end(),
                              mine[k].begin(), mine[k].end(),
                              std::inserter(kept, kept.begin()));
        vocabulary[k] = std::move(kept);
      }
    }
  }
  std::size_t vocab_total = 0;
  for (std::size_t k : ks) vocab_total += vocabulary[k].size();
  if (vocab_total == 0) {
    throw EmptyFeatureError("empty common support for feature kind '" + kind +
                            "'");
  }

  FeatureMatrix m;
  for (const auto& s : d.subjects) {
    m.subject_ids.push_back(s.subject_id);
    m.labels.push_back(s.native_language);
  }
  std::map<std::size_t, std::map<std::string, std::size_t>> key_slot;
  for (std::size_t k : ks) {
    std::size_t slot = 0;
    for (const auto& kkey : vocabulary[k]) {
      key_slot[k][kkey] = slot++;
      for (Metric metric : metrics) {
        m.feature_names.push_back(kind + ":" + std::to_string(k) + ":" + kkey +
                                  "/" + to_string(metric));
      }
    }
  }
  m.values.resize(m.rows() * m.cols());

  for (std::size_t r = 0; r < d.subjects.size(); ++r) {
    const auto& subj = d.subjects[r];
    const auto& trials = per_subject.at(subj.subject_id);
    if (trials.empty()) {
      throw NormalizerError("subject '" + subj.subject_id +
                            "' has no reading input");
    }

    std::map<std::string, std::vector<WordMeasures>> measures;
    for (const Trial* t : trials) {
      measures[t->sentence_id] =
          word_measures(*t, d.sentence(t->sentence_id).tokens.size());
    }

    std::size_t col_base = 0;
    for (std::size_t k : ks) {
      // Full-input normalizer per (metric, k): mean over every window of
      // length k in the subject's input, skipped (zero) windows included.
      std::vector<std::vector<double>> all_values(metrics.size());
      // Per vocabulary key: sum and count of normalized values.
      struct Acc {
        double sum = 0.0;
        std::size_t count = 0;
      };
      std::vector<std::vector<Acc>> acc(
          metrics.size(), std::vector<Acc>(vocabulary[k].size()));

      for (const Trial* t : trials) {
        const auto& sent = d.sentence(t->sentence_id);
        const auto& wm = measures.at(t->sentence_id);
        for (const auto& win : enumerate_sequences(sent, k)) {
          const std::string wkey = window_key(sent, win.start, k);
          auto slot = key_slot[k].find(wkey);
          for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
            double v = sequence_measure(wm, win.start, k, metrics[mi]);
            all_values[mi].push_back(v);
            if (slot != key_slot[k].end()) {
              if (!opt.exclude_skipped || v > 0.0) {
                acc[mi][slot->second].sum += v;
                acc[mi][slot->second].count += 1;
              }
            }
          }
        }
      }

      std::vector<double> scale(metrics.size());
      for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
        try {
          scale[mi] = normalizer(all_values[mi]);
        } catch (const NormalizerError&) {
          throw NormalizerError("zero normalizer for subject '" +
                                subj.subject_id + "', metric " +
                                to_string(metrics[mi]) +
                                ", k=" + std::to_string(k));
        }
      }

      for (std::size_t slot = 0; slot < vocabulary[k].size(); ++slot) {
        for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
          const Acc& a = acc[mi][slot];
          double mean = a.count ? a.sum / static_cast<double>(a.count) : 0.0;
          m.at(r, col_base + slot * metrics.size() + mi) = mean / scale[mi];
        }
      }
      col_base += vocabulary[k].size() * metrics.size();
    }
  }
  return m;
}

FeatureMatrix build_sc(const Dataset& d, const FeatureOptions& opt) {
  const auto kinds = canonical_kinds(opt.label_kinds);
  std::vector<FeatureMatrix> parts;
  for (LabelKind kind : kinds) {
    TokenKeyFn key;
    switch (kind) {
      case LabelKind::kPtb:
        key = [](const AnnotatedSentence& s, std::size_t i) {
          return s.tokens[i].ptb_pos;
        };
        break;
      case LabelKind::kUpos:
        key = [](const AnnotatedSentence& s, std::size_t i) {
          return s.tokens[i].upos;
        };
        break;
      case LabelKind::kDep:
        key = [](const AnnotatedSentence& s, std::size_t i) {
          return s.tokens[i].dep_label;
        };
        break;
    }
    parts.push_back(build_cluster_features(
        d, std::string("sc:") + to_string(kind), key, opt));
  }
  return parts.size() == 1 ? parts[0] : FeatureMatrix::hconcat(parts);
}

FeatureMatrix build_ic(const Dataset& d, const FeatureOptions& opt) {
  return build_cluster_features(
      d, "ic:len",
      [](const AnnotatedSentence& s, std::size_t i) {
        return std::to_string(s.tokens[i].char_length);
      },
      opt);
}

ScalerParams fit_scaler(const FeatureMatrix& m,
                        const std::vector<std::size_t>& row_idx) {
  if (row_idx.empty()) throw ConfigError("fit_scaler: no training rows");
  ScalerParams p;
  p.mean.assign(m.cols(), 0.0);
  p.stddev.assign(m.cols(), 0.0);
  const double n = static_cast<double>(row_idx.size());
  for (std::size_t r : row_idx) {
    for (std::size_t c = 0; c < m.cols(); ++c) p.mean[c] += m.at(r, c);
  }
  for (std::size_t c = 0; c < m.cols(); ++c) p.mean[c] /= n;
  for (std::size_t r : row_idx) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double d = m.at(r, c) - p.mean[c];
      p.stddev[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    p.stddev[c] = std::sqrt(p.stddev[c] / n);  // population convention
  }
  return p;
}

void apply_scaler(FeatureMatrix& m, const ScalerParams& p) {
  if (p.mean.size() != m.cols()) {
    throw ShapeError("scaler dimension mismatch");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      m.at(r, c) = p.stddev[c] > 0.0 ? (m.at(r, c) - p.mean[c]) / p.stddev[c]
                                     : 0.0;
    }
  }
}

void write_feature_matrix(const std::string& path, const FeatureMatrix& m) {
  std::vector<std::string> header = {"subject_id", "native_language"};
  header.insert(header.end(), m.feature_names.begin(), m.feature_names.end());
  std::vector<std::vector<std::string>> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> row = {m.subject_ids[r], m.labels[r]};
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row.push_back(tsv::format_fixed(m.at(r, c), 6));
    }
    rows.push_back(std::move(row));
  }
  tsv::write_file(path, header, rows);
}

}  // namespace gazenli
