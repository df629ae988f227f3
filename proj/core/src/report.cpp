#include "gazenli/report.hpp"

#include <cmath>
#include <fstream>

#include "gazenli/errors.hpp"
#include "gazenli/tsv.hpp"
#include "gazenli/version.hpp"

namespace gazenli {

double round4(double v) {
  if (!std::isfinite(v)) return v;
  return std::round(v * 1e4) / 1e4;
}

namespace {

OrderedJson cv_json(const CvResult& cv) {
  OrderedJson j;
  j["labels"] = cv.labels;
  j["accuracy"] = round4(cv.accuracy);
  OrderedJson folds = OrderedJson::array();
  for (double a : cv.fold_accuracies) folds.push_back(round4(a));
  j["fold_accuracies"] = folds;
  OrderedJson confusion = OrderedJson::array();
  for (std::size_t t = 0; t < cv.labels.size(); ++t) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t p = 0; p < cv.labels.size(); ++p) {
      row.push_back(cv.confusion_at(t, p));
    }
    confusion.push_back(row);
  }
  j["confusion"] = confusion;
  j["held_out_records"] = cv.records.size();
  return j;
}

OrderedJson matrix_json(const std::vector<std::string>& labels,
                        const std::vector<double>& values) {
  OrderedJson j;
  j["labels"] = labels;
  OrderedJson rows = OrderedJson::array();
  for (std::size_t a = 0; a < labels.size(); ++a) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t b = 0; b < labels.size(); ++b) {
      row.push_back(round4(values[a * labels.size() + b]));
    }
    rows.push_back(row);
  }
  j["values"] = rows;
  return j;
}

OrderedJson nan_safe(double v) {
  if (std::isnan(v)) return nullptr;
  return round4(v);
}

}  // namespace

Report::Report(const std::string& command, const OrderedJson& config_echo)
    : config_(config_echo), command_(command) {}

void Report::set_counts(const OrderedJson& counts) { counts_ = counts; }

void Report::add_baseline(const std::string& name, double accuracy) {
  baselines_[name] = round4(accuracy);
  has_results_ = true;
}

void Report::add_cv(const std::string& feature_set, const CvResult& cv) {
  cv_[feature_set] = cv_json(cv);
  for (const auto& w : cv.warnings) warnings_.push_back(w);
  has_results_ = true;
}

void Report::add_binary(const std::string& pair_name, const CvResult& cv) {
  binary_[pair_name] = cv_json(cv);
  for (const auto& w : cv.warnings) warnings_.push_back(w);
  has_results_ = true;
}

void Report::set_ers(const ErsMatrix& ers) {
  ers_ = matrix_json(ers.labels, ers.values);
  has_results_ = true;
}

void Report::set_ls(const SimilarityMatrix& ls) {
  ls_ = matrix_json(ls.labels, ls.values);
  has_results_ = true;
}

void Report::set_correlation(const PairCorrelation& c) {
  correlation_["pearson"] = nan_safe(c.pearson);
  correlation_["spearman"] = nan_safe(c.spearman);
  correlation_["pairs"] = c.pair_count;
  if (std::isnan(c.pearson) || std::isnan(c.spearman)) {
    warnings_.push_back(
        "correlation undefined for a constant input; reported as null");
  }
  has_results_ = true;
}

void Report::add_tree(const std::string& name, const std::string& newick) {
  trees_[name] = newick;
  has_results_ = true;
}

void Report::set_top_weights(const TopWeights& tw) {
  OrderedJson j = OrderedJson::object();
  for (std::size_t y = 0; y < tw.labels.size(); ++y) {
    OrderedJson per_label;
    OrderedJson pos = OrderedJson::array();
    for (const auto& f : tw.positive[y]) {
      pos.push_back(OrderedJson{{"feature", f.name}, {"weight", round4(f.weight)}});
    }
    OrderedJson neg = OrderedJson::array();
    for (const auto& f : tw.negative[y]) {
      neg.push_back(OrderedJson{{"feature", f.name}, {"weight", round4(f.weight)}});
    }
    per_label["positive_slow"] = pos;
    per_label["negative_fast"] = neg;
    j[tw.labels[y]] = per_label;
  }
  if (tw.clamped) {
    warnings_.push_back("top-weight rank clamped to the feature count");
  }
  top_weights_ = j;
  has_results_ = true;
}

void Report::add_warning(const std::string& w) { warnings_.push_back(w); }

OrderedJson reference_targets() {
  // Accuracies reported for the original human-reader dataset (percent).
  // Not reproducible from synthetic data; carried for context only.
  OrderedJson j;
  j["note"] =
      "accuracy targets from the original human-reader study; "
      "not reproducible from synthetic data";
  j["majority_class"] = 25.52;
  j["random_clusters_shared"] = 22.76;
  j["random_clusters_individual"] = 22.07;
  j["wfc_shared_ngrams123"] = 71.03;
  j["sc_ic_individual_ngrams1"] = 51.03;
  j["binary_shared_wfc_min"] = 68.49;  // Portuguese vs Spanish
  j["binary_shared_wfc_max"] = 93.15;  // Spanish vs Japanese
  return j;
}

OrderedJson Report::document() const {
  if (!has_results_) {
    throw ConfigError("report has no result sections");
  }
  OrderedJson doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"] = OrderedJson{{"name", kToolName}, {"version", kToolVersion}};
  doc["command"] = command_;
  doc["config"] = config_;
  if (!counts_.is_null()) doc["counts"] = counts_;
  if (!baselines_.empty()) doc["baselines"] = baselines_;
  if (!cv_.empty()) doc["cv"] = cv_;
  if (!binary_.empty()) doc["binary"] = binary_;
  if (!ers_.is_null()) doc["ers"] = ers_;
  if (!ls_.is_null()) doc["ls"] = ls_;
  if (!correlation_.is_null()) doc["correlation"] = correlation_;
  if (!trees_.empty()) doc["trees"] = trees_;
  if (!top_weights_.is_null()) doc["top_weights"] = top_weights_;
  doc["reference_targets"] = reference_targets();
  doc["warnings"] = warnings_;
  return doc;
}

void Report::write(const std::string& dir) const {
  write_json(dir + "/report.json", document());
}

OrderedJson make_manifest(const std::string& command,
                          const std::vector<std::string>& argv_resolved,
                          std::int64_t seed,
                          const std::map<std::string, std::string>& input_digests) {
  OrderedJson j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = OrderedJson{{"name", kToolName}, {"version", kToolVersion}};
  j["command"] = command;
  j["argv"] = argv_resolved;
  j["seed"] = seed;
  OrderedJson inputs = OrderedJson::object();
  for (const auto& [path, digest] : input_digests) inputs[path] = digest;
  j["inputs"] = inputs;
  return j;
}

void write_json(const std::string& path, const OrderedJson& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

void write_confusion_tsv(const std::string& path, const CvResult& cv) {
  std::vector<std::string> header = {"true\\predicted"};
  header.insert(header.end(), cv.labels.begin(), cv.labels.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < cv.labels.size(); ++t) {
    std::vector<std::string> row = {cv.labels[t]};
    for (std::size_t p = 0; p < cv.labels.size(); ++p) {
      row.push_back(std::to_string(cv.confusion_at(t, p)));
    }
    rows.push_back(std::move(row));
  }
  tsv::write_file(path, header, rows);
}

void write_heldout_tsv(const std::string& path, const CvResult& cv) {
  std::vector<std::string> header = {"subject_id", "fold", "true_label",
                                     "predicted_label"};
  for (const auto& l : cv.labels) header.push_back("p_" + l);
  std::vector<std::vector<std::string>> rows;
  for (const auto& rec : cv.records) {
    std::vector<std::string> row = {rec.subject_id, std::to_string(rec.fold),
                                    rec.true_label, rec.predicted_label};
    for (double p : rec.probs) row.push_back(tsv::format_full(p));
    rows.push_back(std::move(row));
  }
  tsv::write_file(path, header, rows);
}

void write_pairs_tsv(const std::string& path, const ErsMatrix& ers,
                     const SimilarityMatrix& ls) {
  std::map<std::string, std::size_t> ls_idx;
  for (std::size_t i = 0; i < ls.labels.size(); ++i) ls_idx[ls.labels[i]] = i;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t a = 0; a < ers.labels.size(); ++a) {
    for (std::size_t b = a + 1; b < ers.labels.size(); ++b) {
      rows.push_back({ers.labels[a], ers.labels[b],
                      tsv::format_full(ls.at(ls_idx.at(ers.labels[a]),
                                             ls_idx.at(ers.labels[b]))),
                      tsv::format_full(ers.at(a, b))});
    }
  }
  tsv::write_file(path, {"language_a", "language_b", "ls", "ers"}, rows);
}

void write_weights_tsv(const std::string& path, const TopWeights& tw) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t y = 0; y < tw.labels.size(); ++y) {
    for (std::size_t r = 0; r < tw.positive[y].size(); ++r) {
      rows.push_back({tw.labels[y], "positive_slow", std::to_string(r + 1),
                      tw.positive[y][r].name,
                      tsv::format_full(tw.positive[y][r].weight)});
    }
    for (std::size_t r = 0; r < tw.negative[y].size(); ++r) {
      rows.push_back({tw.labels[y], "negative_fast", std::to_string(r + 1),
                      tw.negative[y][r].name,
                      tsv::format_full(tw.negative[y][r].weight)});
    }
  }
  tsv::write_file(path, {"label", "direction", "rank", "feature", "weight"},
                  rows);
}

}  // namespace gazenli
