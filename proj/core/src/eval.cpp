#include "gazenli/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "gazenli/errors.hpp"

namespace gazenli {

int FoldAssignment::fold_for(const std::string& subject_id) const {
  for (std::size_t i = 0; i < subject_ids.size(); ++i) {
    if (subject_ids[i] == subject_id) return fold_of[i];
  }
  throw ConfigError("subject '" + subject_id + "' has no fold assignment");
}

FoldAssignment kfold_split(const std::vector<SubjectRecord>& subjects, int k,
                           std::int64_t seed, bool stratified) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (static_cast<std::size_t>(k) > subjects.size()) {
    throw ConfigError("fold count " + std::to_string(k) +
                      " exceeds subject count " +
                      std::to_string(subjects.size()));
  }

  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  for (const auto& s : subjects) fa.subject_ids.push_back(s.subject_id);
  fa.fold_of.assign(subjects.size(), 0);

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));

  // Groups in canonical label order; one shared cursor balances the
  // remainders across groups.
  std::map<std::string, std::vector<std::size_t>> groups;
  if (stratified) {
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      groups[subjects[i].native_language].push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      groups[""].push_back(i);
    }
  }

  int cursor = 0;
  for (auto& [label, idx] : groups) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      fa.fold_of[idx[i]] = (cursor + static_cast<int>(i)) % k;
    }
    cursor = (cursor + static_cast<int>(idx.size())) % k;
  }
  return fa;
}

CvResult cross_validate(const FeatureMatrix& m, const FoldAssignment& folds,
                        const TrainConfig& cfg) {
  if (m.rows() == 0) throw ConfigError("cross_validate: empty matrix");
  LabelSpace ys = LabelSpace::from_labels(m.labels);

  CvResult cv;
  cv.labels = ys.labels;
  cv.confusion.assign(ys.size() * ys.size(), 0);

  std::map<std::string, int> fold_by_subject;
  for (std::size_t i = 0; i < folds.subject_ids.size(); ++i) {
    fold_by_subject[folds.subject_ids[i]] = folds.fold_of[i];
  }

  std::int64_t correct_total = 0;
  for (int f = 0; f < folds.k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto it = fold_by_subject.find(m.subject_ids[r]);
      if (it == fold_by_subject.end()) {
        throw ConfigError("subject '" + m.subject_ids[r] +
                          "' missing from fold assignment");
      }
      (it->second == f ? test_idx : train_idx).push_back(r);
    }
    if (test_idx.empty()) {
      cv.warnings.push_back("fold " + std::to_string(f) +
                            " has no held-out subjects; skipped");
      continue;
    }
    if (train_idx.empty()) {
      throw ConfigError("fold " + std::to_string(f) + " has no training rows");
    }

    ScalerParams scaler = fit_scaler(m, train_idx);
    FeatureMatrix train_m = m.select_rows(train_idx);
    FeatureMatrix test_m = m.select_rows(test_idx);
    apply_scaler(train_m, scaler);
    apply_scaler(test_m, scaler);
    cv.fold_scalers.push_back(scaler);

    TrainResult tr = train(train_m, ys, cfg);
    for (const auto& w : tr.warnings) {
      cv.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    }

    std::int64_t correct = 0;
    for (std::size_t i = 0; i < test_m.rows(); ++i) {
      HeldOutRecord rec;
      rec.subject_id = test_m.subject_ids[i];
      rec.true_label = test_m.labels[i];
      rec.probs = predict_proba(tr.params, test_m.row(i), test_m.cols());
      rec.predicted_label = predict(tr.params, test_m.row(i), test_m.cols());
      rec.fold = f;

      const std::size_t t = ys.index_of(rec.true_label);
      const std::size_t p = ys.index_of(rec.predicted_label);
      cv.confusion[t * ys.size() + p] += 1;
      if (t == p) {
        ++correct;
        ++correct_total;
      }
      cv.records.push_back(std::move(rec));
    }
    cv.fold_accuracies.push_back(static_cast<double>(correct) /
                                 static_cast<double>(test_m.rows()));
  }

  cv.accuracy = cv.records.empty()
                    ? 0.0
                    : static_cast<double>(correct_total) /
                          static_cast<double>(cv.records.size());
  return cv;
}

double majority_baseline(const std::vector<std::string>& labels) {
  if (labels.empty()) throw ConfigError("majority baseline of zero subjects");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  std::size_t best = 0;
  for (const auto& [l, n] : counts) best = std::max(best, n);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

RandomClustersResult random_clusters_baseline(const Dataset& d, int n_clusters,
                                              std::int64_t seed, int folds_k,
                                              const TrainConfig& cfg,
                                              const FeatureOptions& opt) {
  if (n_clusters <= 0) {
    // Number of distinct syntactic labels across the three label kinds.
    std::set<std::string> ptb, upos, dep;
    for (const auto& [sid, s] : d.sentences) {
      for (const auto& t : s.tokens) {
        ptb.insert(t.ptb_pos);
        upos.insert(t.upos);
        dep.insert(t.dep_label);
      }
    }
    n_clusters = static_cast<int>(ptb.size() + upos.size() + dep.size());
  }
  if (n_clusters < 1) throw ConfigError("no clusters available");

  // One uniform cluster per word TYPE (surface form), drawn in sorted order.
  std::set<std::string> types;
  for (const auto& [sid, s] : d.sentences) {
    for (const auto& t : s.tokens) types.insert(t.surface);
  }
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_int_distribution<int> pick_cluster(0, n_clusters - 1);
  std::map<std::string, int> cluster_of;
  for (const auto& type : types) cluster_of[type] = pick_cluster(rng);

  FeatureMatrix m = build_cluster_features(
      d, "rnd",
      [&cluster_of](const AnnotatedSentence& s, std::size_t i) {
        return std::to_string(cluster_of.at(s.tokens[i].surface));
      },
      opt);

  FoldAssignment folds = kfold_split(d.subjects, folds_k, seed);
  RandomClustersResult out;
  out.n_clusters = n_clusters;
  out.cv = cross_validate(m, folds, cfg);
  return out;
}

CvResult binary_task(const FeatureMatrix& m,
                     const std::pair<std::string, std::string>& pair,
                     const FoldAssignment& folds, const TrainConfig& cfg) {
  for (const auto& label : {pair.first, pair.second}) {
    if (std::find(m.labels.begin(), m.labels.end(), label) == m.labels.end()) {
      throw ConfigError("label '" + label + "' not present in the matrix");
    }
  }
  if (pair.first == pair.second) {
    throw ConfigError("binary task needs two distinct labels");
  }

  std::vector<std::size_t> idx = m.rows_with_labels({pair.first, pair.second});
  FeatureMatrix sub = m.select_rows(idx);

  FoldAssignment sub_folds;
  sub_folds.k = folds.k;
  sub_folds.seed = folds.seed;
  std::set<std::string> keep(sub.subject_ids.begin(), sub.subject_ids.end());
  for (std::size_t i = 0; i < folds.subject_ids.size(); ++i) {
    if (keep.count(folds.subject_ids[i])) {
      sub_folds.subject_ids.push_back(folds.subject_ids[i]);
      sub_folds.fold_of.push_back(folds.fold_of[i]);
    }
  }
  return cross_validate(sub, sub_folds, cfg);
}

ErsMatrix ers_matrix(const CvResult& cv) {
  if (cv.records.empty()) {
    throw ConfigError("no held-out probability records for the ers matrix");
  }
  const std::size_t n = cv.labels.size();
  std::vector<std::size_t> count(n, 0);
  std::vector<double> cross(n * n, 0.0);  // cross[t][y] = sum of p(y) over true-t

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[cv.labels[i]] = i;

  for (const auto& rec : cv.records) {
    const std::size_t t = index.at(rec.true_label);
    ++count[t];
    for (std::size_t y = 0; y < n; ++y) cross[t * n + y] += rec.probs[y];
  }
  for (std::size_t y = 0; y < n; ++y) {
    if (count[y] == 0) {
      throw ConfigError("ers undefined: label '" + cv.labels[y] +
                        "' has no held-out subjects");
    }
  }

  ErsMatrix ers;
  ers.labels = cv.labels;
  ers.values.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = (cross[a * n + b] + cross[b * n + a]) /
                       static_cast<double>(count[a] + count[b]);
      ers.values[a * n + b] = v;
      ers.values[b * n + a] = v;  // symmetric by construction
    }
  }
  return ers;
}

TopWeights top_weights(const ModelParams& params, std::size_t k) {
  TopWeights tw;
  tw.labels = params.labels;
  const std::size_t d = params.n_features();
  if (k > d) {
    k = d;
    tw.clamped = true;
  }

  for (std::size_t y = 0; y < params.n_labels(); ++y) {
    std::vector<RankedFeature> ranked(d);
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (std::size_t y2 = 0; y2 < params.n_labels(); ++y2) {
        mean += params.w(y2, j);
      }
      mean /= static_cast<double>(params.n_labels());
      ranked[j] = RankedFeature{params.feature_names[j],
                                params.w(y, j) - mean};
    }
    auto by_weight_desc = [](const RankedFeature& a, const RankedFeature& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.name < b.name;
    };
    std::sort(ranked.begin(), ranked.end(), by_weight_desc);

    tw.positive.emplace_back(ranked.begin(), ranked.begin() + k);
    std::vector<RankedFeature> neg(ranked.end() - k, ranked.end());
    std::reverse(neg.begin(), neg.end());  // most negative first
    tw.negative.push_back(std::move(neg));
  }
  return tw;
}

}  // namespace gazenli
