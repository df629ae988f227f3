// Acceptance suite: one pass/fail line per criterion, all tolerances pinned.
// Criterion 10 drives the CLI binary named by the GAZENLI_BIN environment
// variable; everything else exercises the library directly.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazenli/corpus.hpp"
#include "gazenli/errors.hpp"
#include "gazenli/eval.hpp"
#include "gazenli/features.hpp"
#include "gazenli/lingsim.hpp"
#include "gazenli/measures.hpp"
#include "gazenli/model.hpp"
#include "gazenli/synth.hpp"
#include "ward_oracle.hpp"

using namespace gazenli;

namespace {

int g_failures = 0;

void verdict(int criterion, const std::string& name, bool ok,
             const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << criterion
            << " (" << name << "): " << detail << "\n";
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols,
                            std::size_t n_labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMatrix m;
  for (std::size_t c = 0; c < cols; ++c) {
    m.feature_names.push_back("f" + std::to_string(c));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    m.subject_ids.push_back("u" + std::to_string(r));
    m.labels.push_back("L" + std::to_string(r % n_labels));
    for (std::size_t c = 0; c < cols; ++c) m.values.push_back(normal(rng));
  }
  return m;
}

// --- 1. analytic gradient vs central finite differences ---------------------

void criterion_gradient() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> normal(0.0, 0.5);
  double worst = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const std::size_t rows = 10 + rng() % 41;  // <= 50
    const std::size_t cols = 4 + rng() % 17;   // <= 20
    FeatureMatrix m = random_matrix(rows, cols, 4, 1000 + instance);
    LabelSpace ys = LabelSpace::from_labels(m.labels);
    const double lambda = (instance % 3 == 0) ? 0.0 : 0.5;
    std::vector<double> w(4 * (cols + 1));
    for (auto& x : w) x = normal(rng);

    auto got = nll_and_gradient(w, m, ys, lambda);
    const double h = 1e-5;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::vector<double> wp = w, wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double fd = (nll_and_gradient(wp, m, ys, lambda).objective -
                         nll_and_gradient(wm, m, ys, lambda).objective) /
                        (2.0 * h);
      const double scale = std::max(1.0, std::fabs(fd));
      worst = std::max(worst, std::fabs(got.gradient[i] - fd) / scale);
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream detail;
  detail << "max relative error " << worst << " (< 1e-5), " << dt
         << " s (< 5 s)";
  verdict(1, "gradient correctness", worst < 1e-5 && dt < 5.0, detail.str());
}

// --- 2. speed invariance -----------------------------------------------------

void criterion_speed_invariance() {
  const auto t0 = std::chrono::steady_clock::now();
  SynthConfig cfg = scenario("default");
  cfg.subjects_per_language = 6;
  cfg.sentences = 20;
  cfg.seed = 20250810;
  Dataset base = generate(cfg);

  FeatureOptions opt;  // all metrics, ngrams 1..3
  FeatureMatrix wfc0 = build_wfc(base, opt);
  FeatureMatrix sc0 = build_sc(base, opt);
  FeatureMatrix ic0 = build_ic(base, opt);

  FeatureOptions uni;
  uni.ks = {1};
  FeatureMatrix train_m =
      FeatureMatrix::hconcat({build_sc(base, uni), build_ic(base, uni)});
  std::vector<std::size_t> all_rows(train_m.rows());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
  ScalerParams scaler = fit_scaler(train_m, all_rows);
  FeatureMatrix train_scaled = train_m;
  apply_scaler(train_scaled, scaler);
  LabelSpace ys = LabelSpace::from_labels(train_scaled.labels);
  TrainResult trained = train(train_scaled, ys, TrainConfig{});
  std::vector<std::string> base_predictions;
  for (std::size_t r = 0; r < train_scaled.rows(); ++r) {
    base_predictions.push_back(
        predict(trained.params, train_scaled.row(r), train_scaled.cols()));
  }

  double worst = 0.0;
  bool predictions_stable = true;
  for (double c : {0.5, 2.0, 10.0}) {
    for (std::size_t target = 0; target < base.subjects.size(); target += 7) {
      Dataset scaled = base;
      const std::string& subject = scaled.subjects[target].subject_id;
      for (auto& t : scaled.trials) {
        if (t.subject_id != subject) continue;
        for (auto& e : t.events) e.duration_ms *= c;
      }
      FeatureMatrix wfc1 = build_wfc(scaled, opt);
      FeatureMatrix sc1 = build_sc(scaled, opt);
      FeatureMatrix ic1 = build_ic(scaled, opt);
      for (auto [a, b] : {std::pair{&wfc0, &wfc1}, std::pair{&sc0, &sc1},
                          std::pair{&ic0, &ic1}}) {
        for (std::size_t i = 0; i < a->values.size(); ++i) {
          worst = std::max(worst, std::fabs(a->values[i] - b->values[i]));
        }
      }

      FeatureMatrix m1 =
          FeatureMatrix::hconcat({build_sc(scaled, uni), build_ic(scaled, uni)});
      apply_scaler(m1, scaler);
      for (std::size_t r = 0; r < m1.rows(); ++r) {
        if (predict(trained.params, m1.row(r), m1.cols()) !=
            base_predictions[r]) {
          predictions_stable = false;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream detail;
  detail << "max feature delta " << worst << " (< 1e-9), predictions "
         << (predictions_stable ? "unchanged" : "CHANGED") << ", " << dt
         << " s (< 10 s)";
  verdict(2, "speed invariance",
          worst < 1e-9 && predictions_stable && dt < 10.0, detail.str());
}

// --- 3. normalization identity ----------------------------------------------

void criterion_normalization_identity() {
  SynthConfig cfg = scenario("default");
  cfg.subjects_per_language = 4;
  cfg.sentences = 12;
  cfg.seed = 3;
  Dataset d = generate(cfg);

  double worst = 0.0;
  for (const auto& subj : d.subjects) {
    std::map<std::string, std::vector<WordMeasures>> measures;
    for (const auto& t : d.trials) {
      if (t.subject_id != subj.subject_id) continue;
      measures[t.sentence_id] =
          word_measures(t, d.sentence(t.sentence_id).tokens.size());
    }
    for (Metric metric : kAllMetrics) {
      for (std::size_t k = 1; k <= 3; ++k) {
        for (const auto& [sid, wm] : measures) {  // sentence scopes
          std::vector<double> values;
          for (const auto& win : enumerate_sequences(d.sentence(sid), k)) {
            values.push_back(sequence_measure(wm, win.start, k, metric));
          }
          if (values.empty()) continue;
          const double s = normalizer(values);
          double mean = 0.0;
          for (double v : values) mean += normalize(v, s);
          mean /= static_cast<double>(values.size());
          worst = std::max(worst, std::fabs(mean - 1.0));
        }
        std::vector<double> values;  // full-input scope
        for (const auto& [sid, wm] : measures) {
          for (const auto& win : enumerate_sequences(d.sentence(sid), k)) {
            values.push_back(sequence_measure(wm, win.start, k, metric));
          }
        }
        const double s = normalizer(values);
        double mean = 0.0;
        for (double v : values) mean += normalize(v, s);
        mean /= static_cast<double>(values.size());
        worst = std::max(worst, std::fabs(mean - 1.0));
      }
    }
  }
  std::ostringstream detail;
  detail << "max |mean - 1| = " << worst << " (< 1e-9)";
  verdict(3, "normalization identity", worst < 1e-9, detail.str());
}

// --- 4. planted-signal recovery ----------------------------------------------

void criterion_planted_recovery() {
  const auto t0 = std::chrono::steady_clock::now();

  SynthConfig cfg = scenario("default");  // 4 languages, 36 subjects, 78 shared
  cfg.seed = 42;
  Dataset d = generate(cfg);
  FeatureOptions sc1;
  sc1.ks = {1};
  FeatureMatrix m = build_sc(d, sc1);
  FoldAssignment folds = kfold_split(d.subjects, 10, 42, /*stratified=*/true);
  CvResult cv = cross_validate(m, folds, TrainConfig{});
  const double planted_accuracy = cv.accuracy;

  double null_correct = 0.0;
  std::size_t null_samples = 0;
  for (std::int64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig null_cfg = scenario("null");
    null_cfg.seed = static_cast<std::uint64_t>(seed);
    Dataset dn = generate(null_cfg);
    FeatureMatrix mn = build_sc(dn, sc1);
    CvResult cvn =
        cross_validate(mn, kfold_split(dn.subjects, 10, seed), TrainConfig{});
    null_correct += cvn.accuracy * static_cast<double>(cvn.records.size());
    null_samples += cvn.records.size();
  }
  const double null_mean = null_correct / static_cast<double>(null_samples);
  const double band =
      3.0 * std::sqrt(0.25 * 0.75 / static_cast<double>(null_samples));

  const double dt = seconds_since(t0);
  std::ostringstream detail;
  detail << "planted accuracy " << planted_accuracy << " (>= 0.80), null mean "
         << null_mean << " in 0.25 +/- " << band << ", " << dt
         << " s (< 180 s)";
  verdict(4, "planted-signal recovery",
          planted_accuracy >= 0.80 && std::fabs(null_mean - 0.25) <= band &&
              dt < 180.0,
          detail.str());
}

// --- 5. regime ordering --------------------------------------------------------

void criterion_regime_ordering() {
  int ordered = 0;
  std::ostringstream detail;
  for (std::int64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg = scenario("default");
    cfg.seed = static_cast<std::uint64_t>(seed);
    Dataset d = generate(cfg);
    FoldAssignment folds = kfold_split(d.subjects, 10, seed);
    FeatureOptions opt;  // ngrams 1,2,3, all metrics

    CvResult wfc = cross_validate(build_wfc(d, opt), folds, TrainConfig{});
    CvResult scic = cross_validate(
        FeatureMatrix::hconcat({build_sc(d, opt), build_ic(d, opt)}), folds,
        TrainConfig{});
    const bool ok = wfc.accuracy >= scic.accuracy && scic.accuracy >= 0.25;
    if (ok) ++ordered;
    detail << "s" << seed << (ok ? ":" : ":!") << wfc.accuracy
           << ">=" << scic.accuracy << " ";
  }
  detail << "(ordering holds in " << ordered << "/5 seeds, need >= 3)";
  verdict(5, "regime ordering", ordered >= 3, detail.str());
}

// --- 6. ers properties ----------------------------------------------------------

void criterion_ers_properties() {
  CvResult uniform;
  uniform.labels = {"A", "B", "C", "D"};
  CvResult confident = uniform;
  for (int i = 0; i < 12; ++i) {
    HeldOutRecord r;
    r.subject_id = "u" + std::to_string(i);
    r.true_label = uniform.labels[static_cast<std::size_t>(i) % 4];
    r.predicted_label = r.true_label;
    r.probs = {0.25, 0.25, 0.25, 0.25};
    uniform.records.push_back(r);
    for (std::size_t y = 0; y < 4; ++y) {
      r.probs[y] = (uniform.labels[y] == r.true_label) ? 1.0 : 0.0;
    }
    confident.records.push_back(r);
  }
  ErsMatrix eu = ers_matrix(uniform);
  ErsMatrix ec = ers_matrix(confident);

  bool symmetric = true, uniform_ok = true, confident_ok = true;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      if (eu.at(a, b) != eu.at(b, a)) symmetric = false;
      if (ec.at(a, b) != ec.at(b, a)) symmetric = false;
      if (a == b) continue;
      if (std::fabs(eu.at(a, b) - 0.25) > 1e-12) uniform_ok = false;
      if (ec.at(a, b) >= 1e-9) confident_ok = false;
    }
  }
  std::ostringstream detail;
  detail << "symmetry " << (symmetric ? "exact" : "BROKEN") << ", uniform "
         << (uniform_ok ? "0.25 +/- 1e-12" : "OFF") << ", confident "
         << (confident_ok ? "< 1e-9" : "OFF");
  verdict(6, "ers properties", symmetric && uniform_ok && confident_ok,
          detail.str());
}

// --- 7. similarity preservation -------------------------------------------------

void criterion_similarity_preservation() {
  int spearman_ok = 0;
  int merges_ok = 0;
  std::ostringstream detail;
  for (std::int64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg = scenario("default");
    cfg.seed = static_cast<std::uint64_t>(seed);
    Dataset d = generate(cfg);
    SimilarityMatrix planted = planted_similarity(cfg);

    FeatureOptions sc1;
    sc1.ks = {1};
    FeatureMatrix m =
        FeatureMatrix::hconcat({build_sc(d, sc1), build_ic(d, sc1)});
    CvResult cv =
        cross_validate(m, kfold_split(d.subjects, 10, seed), TrainConfig{});
    ErsMatrix ers = ers_matrix(cv);
    PairCorrelation corr = pair_correlation(ers, planted);
    if (corr.spearman > 0.7) ++spearman_ok;

    auto first_pair = [](const Dendrogram& t) {
      return std::set<std::string>{t.leaf_names[t.merges[0].a],
                                   t.leaf_names[t.merges[0].b]};
    };
    const std::set<std::string> near_pair = {"Portuguese", "Spanish"};
    Dendrogram ers_tree = ward_tree(SimilarityMatrix{ers.labels, ers.values});
    Dendrogram ls_tree = ward_tree(planted);
    if (first_pair(ers_tree) == near_pair && first_pair(ls_tree) == near_pair) {
      ++merges_ok;
    }
    detail << "s" << seed << ":rho=" << corr.spearman << " ";
  }
  detail << "(spearman > 0.7 in " << spearman_ok
         << "/5, near-pair first merge in " << merges_ok << "/5, need >= 4)";
  verdict(7, "similarity preservation", spearman_ok >= 4 && merges_ok >= 4,
          detail.str());
}

// --- 8. feature-analysis recovery -----------------------------------------------

void criterion_feature_recovery() {
  SynthConfig cfg = scenario("native-binary");  // DT, PRP at 0.7x vs English
  cfg.seed = 42;
  Dataset d = generate(cfg);

  FeatureOptions opt;
  opt.metrics = {Metric::kTotalFixation};
  opt.ks = {1};
  opt.label_kinds = {LabelKind::kPtb};
  FeatureMatrix m = build_sc(d, opt);
  std::vector<std::size_t> all_rows(m.rows());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
  ScalerParams scaler = fit_scaler(m, all_rows);
  apply_scaler(m, scaler);

  LabelSpace ys = LabelSpace::from_labels(m.labels);
  TrainResult trained = train(m, ys, TrainConfig{});
  TopWeights tw = top_weights(trained.params, 5);
  const std::size_t nonnative = ys.index_of("Chinese");

  std::set<std::string> fast;
  for (const auto& f : tw.negative[nonnative]) fast.insert(f.name);
  const bool ok = fast.count("sc:ptb:1:DT/tf") && fast.count("sc:ptb:1:PRP/tf");
  std::ostringstream detail;
  detail << "top-5 negative:";
  for (const auto& f : tw.negative[nonnative]) detail << " " << f.name;
  verdict(8, "feature-analysis recovery", ok, detail.str());
}

// --- 9. ward oracle equivalence ---------------------------------------------------

void criterion_ward_oracle() {
  std::mt19937_64 rng(97);
  int matched = 0;
  for (int rep = 0; rep < 50; ++rep) {
    SimilarityMatrix m;
    m.labels = {"L0", "L1", "L2", "L3"};
    m.values.assign(16, 1.0);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = a + 1; b < 4; ++b) {
        const double s = static_cast<double>(rng() % 100000) / 100000.0;
        m.values[a * 4 + b] = s;
        m.values[b * 4 + a] = s;
      }
    }
    Dendrogram got = ward_tree(m);
    auto want = testutil::ward_oracle(m);
    bool same = got.merges.size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i) {
      same = got.merges[i].a == want[i].a && got.merges[i].b == want[i].b;
    }
    if (same) ++matched;
  }
  std::ostringstream detail;
  detail << matched << "/50 merge sequences match exactly";
  verdict(9, "ward oracle equivalence", matched == 50, detail.str());
}

// --- 10. cli determinism ------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

void criterion_cli_determinism() {
  const char* bin = std::getenv("GAZENLI_BIN");
  if (!bin) {
    verdict(10, "cli determinism", false, "GAZENLI_BIN not set");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() /
                        ("gazenli_accept_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const std::string data = (root / "data").string();
  const std::string quiet = " > /dev/null 2>&1";

  const std::string synth_cmd = std::string(bin) +
                                " synth --scenario default --subjects 6 "
                                "--sentences 16 --seed 11 --out " +
                                data + quiet;
  bool ok = run_cmd(synth_cmd) == 0;

  const std::string cv_args =
      " cv --data " + data +
      " --features sc+ic --ngrams 1 --folds 4 --seed 7 --out ";
  const std::string out1 = (root / "run1").string();
  const std::string out2 = (root / "run2").string();
  ok = ok && run_cmd(std::string(bin) + cv_args + out1 + quiet) == 0;
  ok = ok && run_cmd(std::string(bin) + cv_args + out2 + quiet) == 0;

  const std::string r1 = slurp(out1 + "/report.json");
  const bool identical = ok && !r1.empty() && r1 == slurp(out2 + "/report.json");

  // Re-running the manifest's resolved argv reproduces the report bytes.
  bool manifest_ok = false;
  if (identical) {
    nlohmann::json manifest;
    {
      std::ifstream in(out1 + "/manifest.json");
      in >> manifest;
    }
    std::string replay = std::string(bin);
    const std::string out3 = (root / "run3").string();
    for (const auto& arg : manifest["argv"]) {
      std::string s = arg.get<std::string>();
      if (s == out1) s = out3;  // redirect output
      replay += " " + s;
    }
    manifest_ok =
        run_cmd(replay + quiet) == 0 && slurp(out3 + "/report.json") == r1;
  }

  std::error_code ec;
  fs::remove_all(root, ec);
  std::ostringstream detail;
  detail << "repeat run " << (identical ? "byte-identical" : "DIFFERS")
         << ", manifest replay "
         << (manifest_ok ? "byte-identical" : "DIFFERS");
  verdict(10, "cli determinism", identical && manifest_ok, detail.str());
}

}  // namespace

int main() {
  criterion_gradient();
  criterion_speed_invariance();
  criterion_normalization_identity();
  criterion_planted_recovery();
  criterion_regime_ordering();
  criterion_ers_properties();
  criterion_similarity_preservation();
  criterion_feature_recovery();
  criterion_ward_oracle();
  criterion_cli_determinism();

  if (g_failures == 0) {
    std::cout << "all 10 acceptance criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " acceptance criteria FAILED\n";
  return 1;
}
