#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gazenli/corpus.hpp"
#include "gazenli/measures.hpp"

namespace gazenli {

enum class LabelKind { kPtb, kUpos, kDep };

inline constexpr LabelKind kAllLabelKinds[] = {LabelKind::kPtb, LabelKind::kUpos,
                                               LabelKind::kDep};

const char* to_string(LabelKind k);  // "ptb" / "upos" / "dep"
LabelKind label_kind_from_string(const std::string& s);

/// Per-subject feature rows with a shared, ordered feature vocabulary.
/// Rows follow the dataset's canonical subject order.
struct FeatureMatrix {
  std::vector<std::string> subject_ids;
  std::vector<std::string> labels;  // native language, per row
  std::vector<std::string> feature_names;
  std::vector<double> values;  // row-major, rows() x cols()

  std::size_t rows() const { return subject_ids.size(); }
  std::size_t cols() const { return feature_names.size(); }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  const double* row(std::size_t r) const { return values.data() + r * cols(); }

  /// Column-wise concatenation; subject order must match exactly.
  static FeatureMatrix hconcat(const std::vector<FeatureMatrix>& parts);

  FeatureMatrix select_rows(const std::vector<std::size_t>& idx) const;
  std::vector<std::size_t> rows_with_labels(
      const std::vector<std::string>& keep) const;
};

/// Mean fixation time per window of length k within a normalization scope
/// (Eq. style: arithmetic mean over ALL windows, zero-valued ones included).
/// Throws NormalizerError when the scope is empty or the mean is zero.
double normalizer(const std::vector<double>& window_values);

/// value / s. Throws NormalizerError when s <= 0.
double normalize(double value, double s);

struct FeatureOptions {
  std::vector<Metric> metrics{Metric::kFirstFixation, Metric::kFirstPass,
                              Metric::kTotalFixation};
  std::vector<std::size_t> ks{1, 2, 3};
  std::vector<LabelKind> label_kinds{LabelKind::kPtb, LabelKind::kUpos,
                                     LabelKind::kDep};
  /// When true, zero-valued (skipped) windows are left out of SC/IC cluster
  /// means; they always count toward the normalizer either way.
  bool exclude_skipped = false;
};

/// Words-in-fixed-context features: one feature per (k, sentence, start,
/// metric), normalized per subject against the surrounding sentence's mean
/// window time. Shared regime only. Feature names: wfc:<k>:<sentence>:<start>/<metric>.
FeatureMatrix build_wfc(const Dataset& d, const FeatureOptions& opt);

/// Syntactic-cluster features: per label-kind n-gram key occurring in every
/// subject's input, the mean full-input-normalized window value.
/// Names: sc:<kind>:<k>:<L1_L2>/<metric>.
FeatureMatrix build_sc(const Dataset& d, const FeatureOptions& opt);

/// Information-cluster features keyed by token character lengths.
/// Names: ic:len:<k>:<l1_l2>/<metric>.
FeatureMatrix build_ic(const Dataset& d, const FeatureOptions& opt);

/// SC-style builder over an arbitrary per-token key. Used by build_sc,
/// build_ic and the random-clusters baseline. `kind` becomes the feature-name
/// prefix after "sc"/"ic"/"rnd" conventions, e.g. "sc:ptb".
using TokenKeyFn =
    std::function<std::string(const AnnotatedSentence&, std::size_t)>;
FeatureMatrix build_cluster_features(const Dataset& d, const std::string& kind,
                                     const TokenKeyFn& key,
                                     const FeatureOptions& opt);

/// Z-score parameters (population standard deviation, divide by N).
struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool operator==(const ScalerParams&) const = default;
};

/// Fits on the given rows only (the training side of a fold).
ScalerParams fit_scaler(const FeatureMatrix& m,
                        const std::vector<std::size_t>& row_idx);

/// (x - mean) / stddev in place over every row; zero-deviation columns map
/// to 0 everywhere.
void apply_scaler(FeatureMatrix& m, const ScalerParams& p);

/// TSV dump: subject_id, native_language, then one column per feature,
/// values at 6 decimal places.
void write_feature_matrix(const std::string& path, const FeatureMatrix& m);

}  // namespace gazenli
