#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gazenli/corpus.hpp"
#include "gazenli/features.hpp"
#include "gazenli/model.hpp"

namespace gazenli {

/// Partition of subjects into K folds, stratified by native language.
struct FoldAssignment {
  int k = 0;
  std::int64_t seed = 0;
  std::vector<std::string> subject_ids;
  std::vector<int> fold_of;  // parallel to subject_ids, values 0..k-1

  int fold_for(const std::string& subject_id) const;  // throws ConfigError
};

/// Deterministic given the seed. Stratified by default: per label, fold
/// counts differ by at most one. Throws ConfigError when k < 2 or
/// k > subject count.
FoldAssignment kfold_split(const std::vector<SubjectRecord>& subjects, int k,
                           std::int64_t seed, bool stratified = true);

struct HeldOutRecord {
  std::string subject_id;
  std::string true_label;
  std::string predicted_label;
  std::vector<double> probs;  // over CvResult::labels
  int fold = 0;
};

struct CvResult {
  std::vector<std::string> labels;  // canonical order
  double accuracy = 0.0;            // pooled: trace / total
  std::vector<double> fold_accuracies;
  std::vector<std::int64_t> confusion;  // |Y| x |Y|, row = true, col = predicted
  std::vector<HeldOutRecord> records;
  std::vector<ScalerParams> fold_scalers;  // per fold, fitted on training rows
  std::vector<std::string> warnings;

  std::int64_t confusion_at(std::size_t t, std::size_t p) const {
    return confusion[t * labels.size() + p];
  }
};

/// Per fold: fit the scaler on training rows only, scale both sides, train,
/// and record held-out probabilities and predictions. Pooled accuracy over
/// all subjects.
CvResult cross_validate(const FeatureMatrix& m, const FoldAssignment& folds,
                        const TrainConfig& cfg);

/// Accuracy of always answering the most populous label.
double majority_baseline(const std::vector<std::string>& labels);

/// Random word-type clusters ablation: every distinct surface form is
/// assigned a uniform random cluster, SC-style average features are built
/// over the cluster-id n-grams, and the matrix is cross-validated.
/// n_clusters <= 0 selects the number of distinct syntactic labels across
/// the three label kinds in the dataset.
struct RandomClustersResult {
  CvResult cv;
  int n_clusters = 0;
};
RandomClustersResult random_clusters_baseline(const Dataset& d, int n_clusters,
                                              std::int64_t seed, int folds_k,
                                              const TrainConfig& cfg,
                                              const FeatureOptions& opt);

/// Rows filtered to the pair, then standard cross-validation. The fold
/// assignment is filtered alongside. Throws ConfigError on unknown labels.
CvResult binary_task(const FeatureMatrix& m,
                     const std::pair<std::string, std::string>& pair,
                     const FoldAssignment& folds, const TrainConfig& cfg);

/// Pairwise classification uncertainty, pooled over all held-out records:
/// ers(y,y') = [sum over true-y records of p(y') + sum over true-y' records
/// of p(y)] / (|D_y| + |D_y'|). Exactly symmetric; diagonal unused (zero).
struct ErsMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // |Y| x |Y|

  double at(std::size_t a, std::size_t b) const {
    return values[a * labels.size() + b];
  }
};
ErsMatrix ers_matrix(const CvResult& cv);

/// k strongest positive and k strongest negative features per label, ranked
/// by the label's shift-normalized weight (row minus the across-label mean,
/// so rankings are softmax-shift invariant). Positive = the label dwells
/// longer than the rest; negative = shorter.
struct RankedFeature {
  std::string name;
  double weight = 0.0;
};
struct TopWeights {
  std::vector<std::string> labels;
  std::vector<std::vector<RankedFeature>> positive;  // per label, descending
  std::vector<std::vector<RankedFeature>> negative;  // per label, ascending
  bool clamped = false;  // k exceeded the feature count
};
TopWeights top_weights(const ModelParams& params, std::size_t k);

}  // namespace gazenli
