#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazenli/eval.hpp"
#include "gazenli/lingsim.hpp"

namespace gazenli {

using OrderedJson = nlohmann::ordered_json;

/// Round to 4 decimals for the report document; TSV side-files keep full
/// precision.
double round4(double v);

/// Structured run report. Sections are inserted in a fixed order so the
/// serialized document is byte-stable for identical inputs.
class Report {
 public:
  Report(const std::string& command, const OrderedJson& config_echo);

  void set_counts(const OrderedJson& counts);
  void add_baseline(const std::string& name, double accuracy);
  void add_cv(const std::string& feature_set, const CvResult& cv);
  void add_binary(const std::string& pair_name, const CvResult& cv);
  void set_ers(const ErsMatrix& ers);
  void set_ls(const SimilarityMatrix& ls);
  void set_correlation(const PairCorrelation& c);
  void add_tree(const std::string& name, const std::string& newick);
  void set_top_weights(const TopWeights& tw);
  void add_warning(const std::string& w);

  bool has_results() const { return has_results_; }

  /// Full document including the fixed reference-target constants.
  /// Throws ConfigError when no result section was added.
  OrderedJson document() const;

  /// Writes report.json (and nothing else). Throws IoError.
  void write(const std::string& dir) const;

 private:
  OrderedJson config_;
  OrderedJson counts_;
  OrderedJson baselines_ = OrderedJson::object();
  OrderedJson cv_ = OrderedJson::object();
  OrderedJson binary_ = OrderedJson::object();
  OrderedJson ers_;
  OrderedJson ls_;
  OrderedJson correlation_;
  OrderedJson trees_ = OrderedJson::object();
  OrderedJson top_weights_;
  std::vector<std::string> warnings_;
  std::string command_;
  bool has_results_ = false;
};

/// Accuracy targets reported for the original human-reader dataset. They are
/// context for the synthetic runs, not reproducible gates.
OrderedJson reference_targets();

/// Reproducibility record: command, resolved argv, seed, input digests and
/// the tool version. Contains no timestamps, so identical runs write
/// identical manifests.
OrderedJson make_manifest(const std::string& command,
                          const std::vector<std::string>& argv_resolved,
                          std::int64_t seed,
                          const std::map<std::string, std::string>& input_digests);

void write_json(const std::string& path, const OrderedJson& doc);

// TSV side-files (full precision).
void write_confusion_tsv(const std::string& path, const CvResult& cv);
void write_heldout_tsv(const std::string& path, const CvResult& cv);
void write_pairs_tsv(const std::string& path, const ErsMatrix& ers,
                     const SimilarityMatrix& ls);
void write_weights_tsv(const std::string& path, const TopWeights& tw);

}  // namespace gazenli
