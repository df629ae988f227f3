#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "gazenli/errors.hpp"
#include "gazenli/eval.hpp"
#include "gazenli/synth.hpp"
#include "test_util.hpp"

using namespace gazenli;

namespace {

std::vector<SubjectRecord> subjects_with_counts(
    std::initializer_list<std::pair<std::string, int>> counts) {
  std::vector<SubjectRecord> out;
  for (const auto& [label, n] : counts) {
    for (int i = 0; i < n; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "%03d", i);
      out.push_back(SubjectRecord{label + "_" + buf, label, std::nullopt});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.subject_id < b.subject_id;
  });
  return out;
}

/// Gaussian blobs per label, linearly separable when `gap` is large.
FeatureMatrix blob_matrix(const std::vector<SubjectRecord>& subjects,
                          double gap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::map<std::string, int> label_id;
  for (const auto& s : subjects) {
    label_id.emplace(s.native_language, static_cast<int>(label_id.size()));
  }
  FeatureMatrix m;
  m.feature_names = {"f0", "f1"};
  for (const auto& s : subjects) {
    m.subject_ids.push_back(s.subject_id);
    m.labels.push_back(s.native_language);
    const int c = label_id[s.native_language];
    m.values.push_back(gap * (c % 2) + noise(rng));
    m.values.push_back(gap * (c / 2) + noise(rng));
  }
  return m;
}

CvResult uniform_cv_fixture(int per_label) {
  CvResult cv;
  cv.labels = {"A", "B", "C", "D"};
  for (const auto& label : cv.labels) {
    for (int i = 0; i < per_label; ++i) {
      HeldOutRecord rec;
      rec.subject_id = label + std::to_string(i);
      rec.true_label = label;
      rec.predicted_label = "A";
      rec.probs = {0.25, 0.25, 0.25, 0.25};
      cv.records.push_back(rec);
    }
  }
  return cv;
}

}  // namespace

TEST_CASE("kfold_split: 145 subjects over 10 folds gives sizes 14 or 15") {
  auto subjects = subjects_with_counts(
      {{"Chinese", 36}, {"Japanese", 36}, {"Portuguese", 36}, {"Spanish", 37}});
  FoldAssignment fa = kfold_split(subjects, 10, 42);
  std::vector<int> sizes(10, 0);
  for (int f : fa.fold_of) sizes[f]++;
  for (int s : sizes) CHECK((s == 14 || s == 15));

  // Stratification: each fold holds 3 or 4 of any 36-subject label.
  std::map<std::string, std::vector<int>> per_label(
      {{"Chinese", std::vector<int>(10, 0)}});
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].native_language == "Chinese") {
      per_label["Chinese"][fa.fold_of[i]]++;
    }
  }
  for (int c : per_label["Chinese"]) CHECK((c == 3 || c == 4));
}

TEST_CASE("kfold_split is deterministic in the seed") {
  auto subjects = subjects_with_counts({{"A", 20}, {"B", 25}});
  FoldAssignment fa1 = kfold_split(subjects, 5, 7);
  FoldAssignment fa2 = kfold_split(subjects, 5, 7);
  CHECK(fa1.fold_of == fa2.fold_of);
  FoldAssignment fa3 = kfold_split(subjects, 5, 8);
  CHECK(fa1.fold_of != fa3.fold_of);
}

TEST_CASE("kfold_split validates the fold count") {
  auto subjects = subjects_with_counts({{"A", 4}});
  CHECK_THROWS_AS(kfold_split(subjects, 1, 0), ConfigError);
  CHECK_THROWS_AS(kfold_split(subjects, 5, 0), ConfigError);
}

TEST_CASE("cross_validate bookkeeping on a degenerate two-fold run") {
  auto subjects = subjects_with_counts({{"L", 4}, {"R", 4}});
  FeatureMatrix m = blob_matrix(subjects, 8.0, 3);
  FoldAssignment folds = kfold_split(subjects, 2, 11);
  TrainConfig cfg;
  CvResult cv = cross_validate(m, folds, cfg);

  std::int64_t total = 0;
  for (auto c : cv.confusion) total += c;
  CHECK(total == 8);
  CHECK(cv.records.size() == 8);

  // Row sums equal per-label counts; accuracy is trace over total.
  std::int64_t trace = 0;
  for (std::size_t t = 0; t < cv.labels.size(); ++t) {
    std::int64_t row = 0;
    for (std::size_t p = 0; p < cv.labels.size(); ++p) {
      row += cv.confusion_at(t, p);
    }
    CHECK(row == 4);
    trace += cv.confusion_at(t, t);
  }
  CHECK(cv.accuracy ==
        doctest::Approx(static_cast<double>(trace) / 8.0).epsilon(1e-12));

  for (const auto& rec : cv.records) {
    double sum = 0.0;
    for (double p : rec.probs) sum += p;
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("well-separated blobs cross-validate perfectly") {
  auto subjects = subjects_with_counts({{"A", 12}, {"B", 12}, {"C", 12}});
  FeatureMatrix m = blob_matrix(subjects, 14.0, 5);
  CvResult cv = cross_validate(m, kfold_split(subjects, 6, 1), TrainConfig{});
  CHECK(cv.accuracy == doctest::Approx(1.0));
}

TEST_CASE("fold scalers depend only on training rows") {
  auto subjects = subjects_with_counts({{"A", 6}, {"B", 6}});
  FeatureMatrix m = blob_matrix(subjects, 4.0, 9);
  FoldAssignment folds = kfold_split(subjects, 3, 13);
  CvResult base = cross_validate(m, folds, TrainConfig{});

  // Perturb exactly the held-out rows of fold 0; its scaler must not move.
  FeatureMatrix perturbed = m;
  std::map<std::string, int> fold_by_subject;
  for (std::size_t i = 0; i < folds.subject_ids.size(); ++i) {
    fold_by_subject[folds.subject_ids[i]] = folds.fold_of[i];
  }
  for (std::size_t r = 0; r < perturbed.rows(); ++r) {
    if (fold_by_subject[perturbed.subject_ids[r]] == 0) {
      perturbed.at(r, 0) += 100.0;
      perturbed.at(r, 1) -= 50.0;
    }
  }
  CvResult moved = cross_validate(perturbed, folds, TrainConfig{});
  CHECK(moved.fold_scalers[0] == base.fold_scalers[0]);
}

TEST_CASE("majority baseline") {
  std::vector<std::string> labels;
  for (int i = 0; i < 36; ++i) labels.push_back("Chinese");
  for (int i = 0; i < 36; ++i) labels.push_back("Japanese");
  for (int i = 0; i < 36; ++i) labels.push_back("Portuguese");
  for (int i = 0; i < 37; ++i) labels.push_back("Spanish");
  CHECK(majority_baseline(labels) == doctest::Approx(37.0 / 145.0));
  CHECK(std::fabs(majority_baseline(labels) - 0.2552) < 5e-5);

  CHECK(majority_baseline({"x", "x", "x"}) == 1.0);
  CHECK(majority_baseline({"a", "a", "b", "b"}) == 0.5);
}

TEST_CASE("binary task filters rows and validates labels") {
  auto subjects = subjects_with_counts({{"A", 8}, {"B", 8}, {"C", 8}});
  FeatureMatrix m = blob_matrix(subjects, 10.0, 21);
  FoldAssignment folds = kfold_split(subjects, 4, 2);

  CvResult cv = binary_task(m, {"A", "C"}, folds, TrainConfig{});
  CHECK(cv.labels == std::vector<std::string>{"A", "C"});
  CHECK(cv.records.size() == 16);
  CHECK(cv.accuracy == doctest::Approx(1.0));

  CHECK_THROWS_AS(binary_task(m, {"A", "Z"}, folds, TrainConfig{}),
                  ConfigError);
  CHECK_THROWS_AS(binary_task(m, {"A", "A"}, folds, TrainConfig{}),
                  ConfigError);
}

TEST_CASE("ers of a uniform classifier is 0.25 everywhere") {
  ErsMatrix ers = ers_matrix(uniform_cv_fixture(5));
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      if (a == b) continue;
      CHECK(std::fabs(ers.at(a, b) - 0.25) < 1e-12);
    }
  }
}

TEST_CASE("ers matches the direct two-set arithmetic") {
  // D_y probabilities toward y' are {0.2, 0.4}; D_y' toward y is {0.3}.
  CvResult cv;
  cv.labels = {"y", "z"};
  auto rec = [](std::string subject, std::string true_label,
                std::vector<double> probs) {
    HeldOutRecord r;
    r.subject_id = std::move(subject);
    r.true_label = std::move(true_label);
    r.predicted_label = "y";
    r.probs = std::move(probs);
    return r;
  };
  cv.records = {rec("a", "y", {0.8, 0.2}), rec("b", "y", {0.6, 0.4}),
                rec("c", "z", {0.3, 0.7})};
  ErsMatrix ers = ers_matrix(cv);
  CHECK(ers.at(0, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ers.at(1, 0) == ers.at(0, 1));
}

TEST_CASE("ers of a perfectly confident classifier vanishes") {
  CvResult cv = uniform_cv_fixture(3);
  for (auto& rec : cv.records) {
    for (std::size_t y = 0; y < cv.labels.size(); ++y) {
      rec.probs[y] = (cv.labels[y] == rec.true_label) ? 1.0 : 0.0;
    }
  }
  ErsMatrix ers = ers_matrix(cv);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      if (a != b) CHECK(ers.at(a, b) < 1e-9);
    }
  }
}

TEST_CASE("ers requires held-out subjects for every label") {
  CvResult cv = uniform_cv_fixture(2);
  std::erase_if(cv.records,
                [](const HeldOutRecord& r) { return r.true_label == "C"; });
  CHECK_THROWS_AS(ers_matrix(cv), ConfigError);
}

TEST_CASE("top_weights ranks shift-normalized weights") {
  ModelParams p;
  p.labels = {"English", "Other"};
  p.feature_names = {"sc:ptb:1:DT/tf", "sc:ptb:1:NN/tf", "sc:ptb:1:VB/tf"};
  p.l2_lambda = 1.0;
  p.weights = {
      0.9, -1.1, 0.0, 0.2,   // English row + bias
      -0.9, 1.1, 0.0, -0.2,  // Other row + bias
  };
  TopWeights tw = top_weights(p, 2);
  CHECK(tw.labels[1] == "Other");
  CHECK(tw.negative[1][0].name == "sc:ptb:1:DT/tf");  // fastest for Other
  CHECK(tw.positive[1][0].name == "sc:ptb:1:NN/tf");  // slowest for Other
  CHECK(tw.negative[1][0].weight == doctest::Approx(-0.9));

  TopWeights none = top_weights(p, 0);
  CHECK(none.positive[0].empty());
  CHECK(none.negative[0].empty());

  TopWeights clamped = top_weights(p, 99);
  CHECK(clamped.clamped);
  CHECK(clamped.positive[0].size() == 3);
}

TEST_CASE("random clusters baseline is deterministic in the seed") {
  SynthConfig cfg = scenario("default");
  cfg.subjects_per_language = 3;
  cfg.sentences = 8;
  cfg.seed = 77;
  Dataset d = generate(cfg);

  FeatureOptions opt;
  opt.ks = {1};
  TrainConfig tc;
  auto a = random_clusters_baseline(d, 10, 5, 3, tc, opt);
  auto b = random_clusters_baseline(d, 10, 5, 3, tc, opt);
  CHECK(a.cv.accuracy == b.cv.accuracy);
  CHECK(a.n_clusters == 10);

  // Default cluster count: distinct labels across the three kinds.
  auto c = random_clusters_baseline(d, 0, 5, 3, tc, opt);
  std::set<std::string> ptb, upos, dep;
  for (const auto& [sid, s] : d.sentences) {
    for (const auto& t : s.tokens) {
      ptb.insert(t.ptb_pos);
      upos.insert(t.upos);
      dep.insert(t.dep_label);
    }
  }
  CHECK(c.n_clusters == static_cast<int>(ptb.size() + upos.size() + dep.size()));
}

TEST_CASE("removing a feature column leaves harness bookkeeping intact") {
  auto subjects = subjects_with_counts({{"A", 6}, {"B", 6}});
  FeatureMatrix m = blob_matrix(subjects, 6.0, 33);
  FoldAssignment folds = kfold_split(subjects, 3, 1);
  CvResult full = cross_validate(m, folds, TrainConfig{});

  FeatureMatrix dropped;
  dropped.subject_ids = m.subject_ids;
  dropped.labels = m.labels;
  dropped.feature_names = {m.feature_names[0]};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    dropped.values.push_back(m.at(r, 0));
  }
  CvResult partial = cross_validate(dropped, folds, TrainConfig{});

  std::int64_t full_total = 0, partial_total = 0;
  for (auto v : full.confusion) full_total += v;
  for (auto v : partial.confusion) partial_total += v;
  CHECK(full_total == partial_total);
  CHECK(full.records.size() == partial.records.size());
  CHECK(full.fold_accuracies.size() == partial.fold_accuracies.size());
}

TEST_CASE("binary task on synthetic planted data: far pair separates, "
          "identical pair stays at chance") {
  SynthConfig cfg = scenario("default");
  cfg.subjects_per_language = 12;
  cfg.sentences = 20;
  cfg.seed = 101;
  Dataset d = generate(cfg);
  FeatureOptions opt;
  opt.ks = {1};
  FeatureMatrix m = FeatureMatrix::hconcat({build_sc(d, opt), build_ic(d, opt)});
  FoldAssignment folds = kfold_split(d.subjects, 4, 2);

  CvResult far = binary_task(m, {"Chinese", "Spanish"}, folds, TrainConfig{});
  CHECK(far.accuracy >= 0.85);

  // Identical effects: the null scenario pair carries no signal.
  SynthConfig null_cfg = scenario("null");
  null_cfg.subjects_per_language = 12;
  null_cfg.sentences = 20;
  null_cfg.seed = 103;
  Dataset dn = generate(null_cfg);
  FeatureMatrix mn =
      FeatureMatrix::hconcat({build_sc(dn, opt), build_ic(dn, opt)});
  CvResult same = binary_task(mn, {"Chinese", "Japanese"},
                              kfold_split(dn.subjects, 4, 3), TrainConfig{});
  // 24 held-out subjects: 0.5 +/- 3 * sqrt(0.25 / 24).
  CHECK(std::fabs(same.accuracy - 0.5) <= 3.0 * std::sqrt(0.25 / 24.0));
}
