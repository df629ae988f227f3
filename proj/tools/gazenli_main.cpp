// gazenli: native-language identification from reading fixations.
//
// Subcommands wire the core library into reproducible experiments; every run
// writes report.json plus manifest.json (and TSV side-files) into --out.
// Exit codes: 0 success, 1 data/validation errors, 2 usage errors.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gazenli/corpus.hpp"
#include "gazenli/errors.hpp"
#include "gazenli/eval.hpp"
#include "gazenli/features.hpp"
#include "gazenli/lingsim.hpp"
#include "gazenli/model.hpp"
#include "gazenli/report.hpp"
#include "gazenli/synth.hpp"
#include "gazenli/tsv.hpp"
#include "gazenli/version.hpp"

namespace {

using namespace gazenli;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct DataOpts {
  std::string data_dir;
  std::string regime = "auto";

  Dataset load() const {
    std::optional<Regime> r;
    if (regime == "shared") r = Regime::kShared;
    else if (regime == "individual") r = Regime::kIndividual;
    else if (regime != "auto") throw ConfigError("unknown regime '" + regime + "'");
    return read_dataset(data_dir, r);
  }
  void digests(std::map<std::string, std::string>& out) const {
    for (const char* name : {"sentences.tsv", "fixations.tsv", "subjects.tsv"}) {
      const std::string path = data_dir + "/" + name;
      out[path] = tsv::file_digest(path);
    }
  }
};

struct FeatureSetOpts {
  std::string features;  // wfc | sc | ic | sc+ic | all; empty = per-regime default
  std::string ngrams;    // "1,2,3"; empty = per-regime default
  std::string metrics = "ff,fp,tf";
  std::string label_kinds = "ptb,upos,dep";
  bool exclude_skipped = false;

  void resolve(Regime regime) {
    if (features.empty()) {
      features = regime == Regime::kShared ? "wfc" : "sc+ic";
    }
    if (ngrams.empty()) {
      ngrams = regime == Regime::kShared ? "1,2,3" : "1";
    }
  }

  FeatureOptions options() const {
    FeatureOptions opt;
    opt.metrics.clear();
    for (const auto& m : split_csv(metrics)) {
      opt.metrics.push_back(metric_from_string(m));
    }
    opt.ks.clear();
    for (const auto& k : split_csv(ngrams)) {
      opt.ks.push_back(static_cast<std::size_t>(std::stoul(k)));
    }
    opt.label_kinds.clear();
    for (const auto& k : split_csv(label_kinds)) {
      opt.label_kinds.push_back(label_kind_from_string(k));
    }
    opt.exclude_skipped = exclude_skipped;
    return opt;
  }
};

struct TrainOpts {
  double lambda = 1.0;
  int lbfgs_memory = 10;
  double tolerance = 1e-6;
  int max_iterations = 500;

  TrainConfig config(std::int64_t seed) const {
    TrainConfig cfg;
    cfg.l2_lambda = lambda;
    cfg.lbfgs_memory = lbfgs_memory;
    cfg.gradient_tolerance = tolerance;
    cfg.max_iterations = max_iterations;
    cfg.seed = seed;
    return cfg;
  }
};

FeatureMatrix build_features(const Dataset& d, const std::string& set_name,
                             const FeatureOptions& opt) {
  if (set_name == "wfc") return build_wfc(d, opt);
  if (set_name == "sc") return build_sc(d, opt);
  if (set_name == "ic") return build_ic(d, opt);
  if (set_name == "sc+ic") {
    return FeatureMatrix::hconcat({build_sc(d, opt), build_ic(d, opt)});
  }
  if (set_name == "all") {
    return FeatureMatrix::hconcat(
        {build_wfc(d, opt), build_sc(d, opt), build_ic(d, opt)});
  }
  throw ConfigError("unknown feature set '" + set_name +
                    "' (expected wfc, sc, ic, sc+ic or all)");
}

OrderedJson dataset_counts(const Dataset& d) {
  std::size_t tokens = 0;
  for (const auto& [sid, s] : d.sentences) tokens += s.tokens.size();
  std::size_t events = 0;
  for (const auto& t : d.trials) events += t.events.size();
  OrderedJson j;
  j["regime"] = to_string(d.regime);
  j["sentences"] = d.sentences.size();
  j["tokens"] = tokens;
  j["subjects"] = d.subjects.size();
  j["trials"] = d.trials.size();
  j["events"] = events;
  return j;
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out);
}

std::int64_t effective_seed(std::int64_t cli_seed) {
  if (const char* env = std::getenv("GAZE_NLI_SEED")) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
      throw ConfigError("GAZE_NLI_SEED is not an integer: " + std::string(env));
    }
  }
  return cli_seed;
}

OrderedJson config_echo(const std::vector<std::string>& argv) {
  OrderedJson j = OrderedJson::array();
  for (const auto& a : argv) j.push_back(a);
  return j;
}

void finish_run(const std::string& out, const std::string& command,
                const std::vector<std::string>& argv, std::int64_t seed,
                const std::map<std::string, std::string>& digests,
                const Report& report) {
  report.write(out);
  write_json(out + "/manifest.json", make_manifest(command, argv, seed, digests));
}

// ---------------------------------------------------------------------------

int cmd_validate(const DataOpts& data) {
  Dataset d = data.load();
  ValidationReport report = validate_dataset(d);
  for (const auto& e : report.errors) std::cout << "error: " << e << "\n";
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  std::cout << (report.ok() ? "ok" : "invalid") << ": " << report.errors.size()
            << " error(s), " << report.warnings.size() << " warning(s)\n";
  return report.ok() ? 0 : 1;
}

int cmd_synth(const std::string& scenario_name, const std::string& regime,
              int subjects, int sentences, std::int64_t seed,
              const std::string& out) {
  SynthConfig cfg = scenario(scenario_name);
  if (regime == "individual") cfg.regime = Regime::kIndividual;
  else if (regime == "shared") cfg.regime = Regime::kShared;
  else throw ConfigError("unknown regime '" + regime + "'");
  if (subjects > 0) cfg.subjects_per_language = subjects;
  if (sentences > 0) cfg.sentences = sentences;
  cfg.seed = static_cast<std::uint64_t>(seed);

  ensure_out_dir(out);
  Dataset d = generate(cfg);
  write_dataset(out, d);
  SimilarityMatrix planted = planted_similarity(cfg);
  write_similarity(out + "/planted_similarity.tsv", planted);
  {
    std::ofstream manifest(out + "/scenario.txt", std::ios::binary);
    manifest << scenario_manifest(cfg);
  }

  std::vector<std::string> argv = {"synth",
                                   "--scenario", scenario_name,
                                   "--regime", regime,
                                   "--subjects", std::to_string(cfg.subjects_per_language),
                                   "--sentences", std::to_string(cfg.sentences),
                                   "--seed", std::to_string(seed),
                                   "--out", out};
  Report report("synth", config_echo(argv));
  report.set_counts(dataset_counts(d));
  report.set_ls(planted);
  finish_run(out, "synth", argv, seed, {}, report);
  std::cout << "wrote " << d.sentences.size() << " sentences, "
            << d.subjects.size() << " subjects to " << out << "\n";
  return 0;
}

std::vector<std::string> feature_argv(const DataOpts& data,
                                      const FeatureSetOpts& fs) {
  return {"--data", data.data_dir, "--regime", data.regime,
          "--features", fs.features, "--ngrams", fs.ngrams,
          "--metrics", fs.metrics, "--label-kinds", fs.label_kinds};
}

std::vector<std::string> train_argv(const TrainOpts& tr) {
  return {"--lambda", tsv::format_full(tr.lambda),
          "--lbfgs-memory", std::to_string(tr.lbfgs_memory),
          "--tolerance", tsv::format_full(tr.tolerance),
          "--max-iterations", std::to_string(tr.max_iterations)};
}

int cmd_featurize(DataOpts data, FeatureSetOpts fs, const std::string& out) {
  Dataset d = data.load();
  data.regime = to_string(d.regime);
  fs.resolve(d.regime);
  FeatureMatrix m = build_features(d, fs.features, fs.options());

  ensure_out_dir(out);
  write_feature_matrix(out + "/features.tsv", m);

  std::vector<std::string> argv = {"featurize"};
  auto fa = feature_argv(data, fs);
  argv.insert(argv.end(), fa.begin(), fa.end());
  argv.push_back("--out");
  argv.push_back(out);

  Report report("featurize", config_echo(argv));
  OrderedJson counts = dataset_counts(d);
  counts["feature_set"] = fs.features;
  counts["features"] = m.cols();
  report.set_counts(counts);
  report.add_baseline("majority_class", majority_baseline(m.labels));

  std::map<std::string, std::string> digests;
  data.digests(digests);
  finish_run(out, "featurize", argv, 0, digests, report);
  std::cout << fs.features << ": " << m.cols() << " features for " << m.rows()
            << " subjects\n";
  return 0;
}

struct CvRun {
  Dataset dataset;
  FeatureMatrix matrix;
  CvResult cv;
  FoldAssignment folds;
};

CvRun run_cv(DataOpts& data, FeatureSetOpts& fs, const TrainOpts& tr, int folds,
             std::int64_t seed, bool stratified) {
  CvRun run;
  run.dataset = data.load();
  data.regime = to_string(run.dataset.regime);
  fs.resolve(run.dataset.regime);
  run.matrix = build_features(run.dataset, fs.features, fs.options());
  run.folds = kfold_split(run.dataset.subjects, folds, seed, stratified);
  run.cv = cross_validate(run.matrix, run.folds, tr.config(seed));
  return run;
}

int cmd_cv(DataOpts data, FeatureSetOpts fs, TrainOpts tr, int folds,
           std::int64_t seed, bool no_stratify, const std::string& out) {
  seed = effective_seed(seed);
  CvRun run = run_cv(data, fs, tr, folds, seed, !no_stratify);

  ensure_out_dir(out);
  std::vector<std::string> argv = {"cv"};
  auto fa = feature_argv(data, fs);
  argv.insert(argv.end(), fa.begin(), fa.end());
  auto ta = train_argv(tr);
  argv.insert(argv.end(), ta.begin(), ta.end());
  argv.push_back("--folds");
  argv.push_back(std::to_string(folds));
  argv.push_back("--seed");
  argv.push_back(std::to_string(seed));
  if (no_stratify) argv.push_back("--no-stratify");
  argv.push_back("--out");
  argv.push_back(out);

  Report report("cv", config_echo(argv));
  OrderedJson counts = dataset_counts(run.dataset);
  counts["feature_set"] = fs.features;
  counts["features"] = run.matrix.cols();
  report.set_counts(counts);
  report.add_baseline("majority_class", majority_baseline(run.matrix.labels));
  report.add_cv(fs.features, run.cv);

  write_confusion_tsv(out + "/confusion_" + fs.features + ".tsv", run.cv);
  write_heldout_tsv(out + "/heldout_" + fs.features + ".tsv", run.cv);

  std::map<std::string, std::string> digests;
  data.digests(digests);
  finish_run(out, "cv", argv, seed, digests, report);
  std::cout << fs.features << " accuracy: " << round4(run.cv.accuracy) << "\n";
  return 0;
}

int cmd_binary(DataOpts data, FeatureSetOpts fs, TrainOpts tr,
               const std::string& pair_arg, int folds, std::int64_t seed,
               const std::string& out) {
  seed = effective_seed(seed);
  auto pair_labels = split_csv(pair_arg);
  if (pair_labels.size() != 2) {
    throw ConfigError("--pair expects two comma-separated labels");
  }

  Dataset d = data.load();
  data.regime = to_string(d.regime);
  fs.resolve(d.regime);
  FeatureMatrix m = build_features(d, fs.features, fs.options());
  FoldAssignment fa = kfold_split(d.subjects, folds, seed);
  CvResult cv =
      binary_task(m, {pair_labels[0], pair_labels[1]}, fa, tr.config(seed));

  ensure_out_dir(out);
  std::vector<std::string> argv = {"binary", "--pair", pair_arg};
  auto fv = feature_argv(data, fs);
  argv.insert(argv.end(), fv.begin(), fv.end());
  auto ta = train_argv(tr);
  argv.insert(argv.end(), ta.begin(), ta.end());
  argv.push_back("--folds");
  argv.push_back(std::to_string(folds));
  argv.push_back("--seed");
  argv.push_back(std::to_string(seed));
  argv.push_back("--out");
  argv.push_back(out);

  const std::string pair_name = pair_labels[0] + "_vs_" + pair_labels[1];
  Report report("binary", config_echo(argv));
  OrderedJson counts = dataset_counts(d);
  counts["feature_set"] = fs.features;
  counts["features"] = m.cols();
  report.set_counts(counts);
  report.add_binary(pair_name, cv);
  write_confusion_tsv(out + "/confusion_" + pair_name + ".tsv", cv);
  write_heldout_tsv(out + "/heldout_" + pair_name + ".tsv", cv);

  std::map<std::string, std::string> digests;
  data.digests(digests);
  finish_run(out, "binary", argv, seed, digests, report);
  std::cout << pair_name << " accuracy: " << round4(cv.accuracy) << "\n";
  return 0;
}

int cmd_ers(DataOpts data, FeatureSetOpts fs, TrainOpts tr, int folds,
            std::int64_t seed, const std::string& out) {
  seed = effective_seed(seed);
  CvRun run = run_cv(data, fs, tr, folds, seed, true);
  ErsMatrix ers = ers_matrix(run.cv);

  ensure_out_dir(out);
  std::vector<std::string> argv = {"ers"};
  auto fv = feature_argv(data, fs);
  argv.insert(argv.end(), fv.begin(), fv.end());
  auto ta = train_argv(tr);
  argv.insert(argv.end(), ta.begin(), ta.end());
  argv.push_back("--folds");
  argv.push_back(std::to_string(folds));
  argv.push_back("--seed");
  argv.push_back(std::to_string(seed));
  argv.push_back("--out");
  argv.push_back(out);

  Report report("ers", config_echo(argv));
  OrderedJson counts = dataset_counts(run.dataset);
  counts["feature_set"] = fs.features;
  counts["features"] = run.matrix.cols();
  report.set_counts(counts);
  report.add_cv(fs.features, run.cv);
  report.set_ers(ers);
  report.add_tree("ers", to_newick(ward_tree(SimilarityMatrix{
                             ers.labels, ers.values})));
  write_similarity(out + "/ers.tsv", SimilarityMatrix{ers.labels, ers.values});

  std::map<std::string, std::string> digests;
  data.digests(digests);
  finish_run(out, "ers", argv, seed, digests, report);
  std::cout << "ers over " << ers.labels.size() << " languages written\n";
  return 0;
}

SimilarityMatrix load_ls(const std::string& typology_path,
                         const std::string& similarity_path, int knn_k,
                         Report* report) {
  if (!similarity_path.empty()) {
    return read_similarity(similarity_path);
  }
  TypologyTable table = parse_typology(typology_path);
  ImputeResult imputed = impute_knn(table, knn_k);
  for (const auto& f : imputed.dropped_features) {
    if (report) report->add_warning("typology feature dropped (all missing): " + f);
  }
  TruncateResult truncated = truncate_constant(imputed.vectors);
  return similarity_from_vectors(truncated.vectors);
}

int cmd_lingsim(const std::string& typology_path, int knn_k,
                const std::string& out) {
  ensure_out_dir(out);
  std::vector<std::string> argv = {"lingsim", "--typology", typology_path,
                                   "--knn", std::to_string(knn_k),
                                   "--out", out};
  Report report("lingsim", config_echo(argv));
  SimilarityMatrix ls = load_ls(typology_path, "", knn_k, &report);
  report.set_ls(ls);
  const std::string newick = to_newick(ward_tree(ls));
  report.add_tree("ls", newick);
  write_similarity(out + "/ls.tsv", ls);
  {
    std::ofstream trees(out + "/trees.nwk", std::ios::binary);
    trees << newick << "\n";
  }
  finish_run(out, "lingsim", argv, 0,
             {{typology_path, tsv::file_digest(typology_path)}}, report);
  std::cout << "ls over " << ls.labels.size() << " languages written\n";
  return 0;
}

int cmd_cluster(const std::string& similarity_path,
                const std::string& typology_path, int knn_k,
                const std::string& out) {
  if (similarity_path.empty() && typology_path.empty()) {
    throw ConfigError("cluster needs --similarity or --typology");
  }
  ensure_out_dir(out);
  std::vector<std::string> argv = {"cluster"};
  if (!similarity_path.empty()) {
    argv.push_back("--similarity");
    argv.push_back(similarity_path);
  } else {
    argv.push_back("--typology");
    argv.push_back(typology_path);
    argv.push_back("--knn");
    argv.push_back(std::to_string(knn_k));
  }
  argv.push_back("--out");
  argv.push_back(out);

  Report report("cluster", config_echo(argv));
  SimilarityMatrix sim = load_ls(typology_path, similarity_path, knn_k, &report);
  Dendrogram tree = ward_tree(sim);
  const std::string newick = to_newick(tree);
  report.add_tree("similarity", newick);
  {
    std::ofstream trees(out + "/trees.nwk", std::ios::binary);
    trees << newick << "\n";
  }
  std::map<std::string, std::string> digests;
  const std::string used =
      similarity_path.empty() ? typology_path : similarity_path;
  digests[used] = tsv::file_digest(used);
  finish_run(out, "cluster", argv, 0, digests, report);
  std::cout << newick << "\n";
  return 0;
}

int cmd_correlate(DataOpts data, FeatureSetOpts fs, TrainOpts tr, int folds,
                  std::int64_t seed, const std::string& typology_path,
                  const std::string& similarity_path, int knn_k,
                  const std::string& out) {
  seed = effective_seed(seed);
  if (typology_path.empty() && similarity_path.empty()) {
    throw ConfigError("correlate needs --typology or --similarity");
  }
  CvRun run = run_cv(data, fs, tr, folds, seed, true);
  ErsMatrix ers = ers_matrix(run.cv);

  ensure_out_dir(out);
  std::vector<std::string> argv = {"correlate"};
  auto fv = feature_argv(data, fs);
  argv.insert(argv.end(), fv.begin(), fv.end());
  auto ta = train_argv(tr);
  argv.insert(argv.end(), ta.begin(), ta.end());
  argv.push_back("--folds");
  argv.push_back(std::to_string(folds));
  argv.push_back("--seed");
  argv.push_back(std::to_string(seed));
  if (!typology_path.empty()) {
    argv.push_back("--typology");
    argv.push_back(typology_path);
    argv.push_back("--knn");
    argv.push_back(std::to_string(knn_k));
  }
  if (!similarity_path.empty()) {
    argv.push_back("--similarity");
    argv.push_back(similarity_path);
  }
  argv.push_back("--out");
  argv.push_back(out);

  Report report("correlate", config_echo(argv));
  SimilarityMatrix ls = load_ls(typology_path, similarity_path, knn_k, &report);
  PairCorrelation corr = pair_correlation(ers, ls);

  OrderedJson counts = dataset_counts(run.dataset);
  counts["feature_set"] = fs.features;
  counts["features"] = run.matrix.cols();
  report.set_counts(counts);
  report.add_cv(fs.features, run.cv);
  report.set_ers(ers);
  report.set_ls(ls);
  report.set_correlation(corr);
  const std::string ers_newick =
      to_newick(ward_tree(SimilarityMatrix{ers.labels, ers.values}));
  const std::string ls_newick = to_newick(ward_tree(ls));
  report.add_tree("ls", ls_newick);
  report.add_tree("ers", ers_newick);

  write_similarity(out + "/ers.tsv", SimilarityMatrix{ers.labels, ers.values});
  write_similarity(out + "/ls.tsv", ls);
  write_pairs_tsv(out + "/pairs.tsv", ers, ls);
  {
    std::ofstream trees(out + "/trees.nwk", std::ios::binary);
    trees << ls_newick << "\n" << ers_newick << "\n";
  }

  std::map<std::string, std::string> digests;
  data.digests(digests);
  if (!typology_path.empty()) {
    digests[typology_path] = tsv::file_digest(typology_path);
  }
  if (!similarity_path.empty()) {
    digests[similarity_path] = tsv::file_digest(similarity_path);
  }
  finish_run(out, "correlate", argv, seed, digests, report);
  std::cout << "spearman " << round4(corr.spearman) << " pearson "
            << round4(corr.pearson) << " over " << corr.pair_count
            << " pairs\n";
  return 0;
}

int cmd_report(DataOpts data, FeatureSetOpts fs, TrainOpts tr, int folds,
               std::int64_t seed, const std::string& typology_path,
               const std::string& similarity_path, int knn_k,
               const std::string& native_label, int top_k,
               const std::string& out) {
  seed = effective_seed(seed);
  Dataset d = data.load();
  data.regime = to_string(d.regime);
  fs.resolve(d.regime);

  ValidationReport validation = validate_dataset(d);
  if (!validation.ok()) {
    for (const auto& e : validation.errors) std::cerr << "error: " << e << "\n";
    return 1;
  }

  ensure_out_dir(out);
  std::vector<std::string> argv = {"report"};
  auto fv = feature_argv(data, fs);
  argv.insert(argv.end(), fv.begin(), fv.end());
  auto ta = train_argv(tr);
  argv.insert(argv.end(), ta.begin(), ta.end());
  argv.push_back("--folds");
  argv.push_back(std::to_string(folds));
  argv.push_back("--seed");
  argv.push_back(std::to_string(seed));
  if (!typology_path.empty()) {
    argv.push_back("--typology");
    argv.push_back(typology_path);
    argv.push_back("--knn");
    argv.push_back(std::to_string(knn_k));
  }
  if (!similarity_path.empty()) {
    argv.push_back("--similarity");
    argv.push_back(similarity_path);
  }
  argv.push_back("--native-label");
  argv.push_back(native_label);
  argv.push_back("--top-k");
  argv.push_back(std::to_string(top_k));
  argv.push_back("--out");
  argv.push_back(out);

  Report report("report", config_echo(argv));
  for (const auto& w : validation.warnings) report.add_warning(w);

  // Non-native subjects drive the classification tables; the native-label
  // group (when present) only anchors the weight analysis.
  std::set<std::string> labels_all;
  for (const auto& s : d.subjects) labels_all.insert(s.native_language);
  const bool has_native = labels_all.count(native_label) > 0;
  Dataset esl = d;
  if (has_native) {
    std::erase_if(esl.subjects, [&](const SubjectRecord& s) {
      return s.native_language == native_label;
    });
    std::set<std::string> keep;
    for (const auto& s : esl.subjects) keep.insert(s.subject_id);
    std::erase_if(esl.trials, [&](const Trial& t) {
      return !keep.count(t.subject_id);
    });
  }
  if (esl.subjects.empty()) {
    throw ConfigError("no non-native subjects left to classify");
  }
  std::set<std::string> esl_label_set;
  for (const auto& s : esl.subjects) esl_label_set.insert(s.native_language);
  const bool multiclass = esl_label_set.size() >= 2;

  OrderedJson counts = dataset_counts(d);
  counts["feature_set"] = fs.features;
  report.set_counts(counts);

  std::string ers_newick, ls_newick;
  if (multiclass) {
    FeatureMatrix main_matrix = build_features(esl, fs.features, fs.options());
    FoldAssignment main_folds = kfold_split(esl.subjects, folds, seed);
    CvResult main_cv = cross_validate(main_matrix, main_folds, tr.config(seed));
    counts["features"] = main_matrix.cols();
    report.set_counts(counts);

    std::vector<std::string> esl_labels;
    for (const auto& s : esl.subjects) esl_labels.push_back(s.native_language);
    report.add_baseline("majority_class", majority_baseline(esl_labels));
    {
      RandomClustersResult rc = random_clusters_baseline(
          esl, 0, seed, folds, tr.config(seed), fs.options());
      report.add_baseline("random_clusters", rc.cv.accuracy);
    }

    report.add_cv(fs.features, main_cv);
    write_confusion_tsv(out + "/confusion_" + fs.features + ".tsv", main_cv);
    write_heldout_tsv(out + "/heldout_" + fs.features + ".tsv", main_cv);

    // Classifier-uncertainty similarity from unigram cluster features, which
    // work in both regimes.
    FeatureSetOpts cluster_fs = fs;
    cluster_fs.features = "sc+ic";
    cluster_fs.ngrams = "1";
    FeatureMatrix cluster_matrix =
        build_features(esl, cluster_fs.features, cluster_fs.options());
    CvResult cluster_cv =
        cross_validate(cluster_matrix, main_folds, tr.config(seed));
    if (cluster_fs.features != fs.features || cluster_fs.ngrams != fs.ngrams) {
      report.add_cv("sc+ic(ngrams=1)", cluster_cv);
    }
    ErsMatrix ers = ers_matrix(cluster_cv);
    report.set_ers(ers);
    write_similarity(out + "/ers.tsv",
                     SimilarityMatrix{ers.labels, ers.values});
    ers_newick = to_newick(ward_tree(SimilarityMatrix{ers.labels, ers.values}));
    report.add_tree("ers", ers_newick);

    if (!typology_path.empty() || !similarity_path.empty()) {
      SimilarityMatrix ls =
          load_ls(typology_path, similarity_path, knn_k, &report);
      report.set_ls(ls);
      report.set_correlation(pair_correlation(ers, ls));
      ls_newick = to_newick(ward_tree(ls));
      report.add_tree("ls", ls_newick);
      write_similarity(out + "/ls.tsv", ls);
      write_pairs_tsv(out + "/pairs.tsv", ers, ls);
    }
  } else {
    report.add_warning(
        "only one non-native language present; classification and "
        "similarity sections skipped");
  }
  if (!ers_newick.empty() || !ls_newick.empty()) {
    std::ofstream trees(out + "/trees.nwk", std::ios::binary);
    if (!ls_newick.empty()) trees << ls_newick << "\n";
    if (!ers_newick.empty()) trees << ers_newick << "\n";
  }

  // Native-vs-non-native weight analysis over unigram PTB total-fixation
  // features, one binary model per non-native language.
  if (has_native) {
    FeatureOptions weight_opt;
    weight_opt.metrics = {Metric::kTotalFixation};
    weight_opt.ks = {1};
    weight_opt.label_kinds = {LabelKind::kPtb};
    FeatureMatrix weight_matrix = build_sc(d, weight_opt);

    TopWeights combined;
    for (const auto& other : labels_all) {
      if (other == native_label) continue;
      std::vector<std::size_t> rows =
          weight_matrix.rows_with_labels({native_label, other});
      FeatureMatrix pair_matrix = weight_matrix.select_rows(rows);
      std::vector<std::size_t> all_rows(pair_matrix.rows());
      for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
      ScalerParams scaler = fit_scaler(pair_matrix, all_rows);
      apply_scaler(pair_matrix, scaler);
      LabelSpace ys = LabelSpace::from_labels(pair_matrix.labels);
      TrainResult trained = train(pair_matrix, ys, tr.config(seed));
      TopWeights tw =
          top_weights(trained.params, static_cast<std::size_t>(top_k));
      const std::size_t yi = ys.index_of(other);
      combined.labels.push_back(other);
      combined.positive.push_back(tw.positive[yi]);
      combined.negative.push_back(tw.negative[yi]);
      combined.clamped = combined.clamped || tw.clamped;
    }
    report.set_top_weights(combined);
    write_weights_tsv(out + "/weights.tsv", combined);
  } else {
    report.add_warning("native label '" + native_label +
                       "' absent; top-weight analysis skipped");
  }

  std::map<std::string, std::string> digests;
  data.digests(digests);
  if (!typology_path.empty()) {
    digests[typology_path] = tsv::file_digest(typology_path);
  }
  if (!similarity_path.empty()) {
    digests[similarity_path] = tsv::file_digest(similarity_path);
  }
  finish_run(out, "report", argv, seed, digests, report);
  std::cout << "report written to " << out << "/report.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"native language identification from reading fixations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  DataOpts data;
  FeatureSetOpts fs;
  TrainOpts tr;
  int folds = 10;
  std::int64_t seed = 42;
  bool no_stratify = false;
  std::string out;
  std::string pair_arg;
  std::string typology_path, similarity_path;
  int knn_k = 3;
  std::string scenario_name = "default";
  std::string synth_regime = "shared";
  int synth_subjects = 0, synth_sentences = 0;
  std::string native_label = "English";
  int top_k = 5;

  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--data", data.data_dir,
                    "directory with sentences.tsv, fixations.tsv, subjects.tsv")
        ->required();
    cmd->add_option("--regime", data.regime,
                    "auto | shared | individual (default auto)");
  };
  auto add_features = [&](CLI::App* cmd) {
    cmd->add_option("--features", fs.features,
                    "wfc | sc | ic | sc+ic | all (default per regime)");
    cmd->add_option("--ngrams", fs.ngrams,
                    "comma list of 1,2,3 (default per regime)");
    cmd->add_option("--metrics", fs.metrics, "comma list of ff,fp,tf");
    cmd->add_option("--label-kinds", fs.label_kinds,
                    "comma list of ptb,upos,dep (sc only)");
    cmd->add_flag("--exclude-skipped", fs.exclude_skipped,
                  "leave zero-valued windows out of cluster means");
  };
  auto add_train = [&](CLI::App* cmd) {
    cmd->add_option("--lambda", tr.lambda, "l2 strength (bias excluded)");
    cmd->add_option("--lbfgs-memory", tr.lbfgs_memory, "correction pairs");
    cmd->add_option("--tolerance", tr.tolerance, "gradient-norm stop");
    cmd->add_option("--max-iterations", tr.max_iterations, "optimizer cap");
  };
  auto add_cv = [&](CLI::App* cmd) {
    cmd->add_option("--folds", folds, "cross-validation folds");
    cmd->add_option("--seed", seed, "rng seed (GAZE_NLI_SEED overrides)");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "output directory")->required();
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a dataset");
  add_data(validate_cmd);

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--scenario", scenario_name,
                        "default | null | native-binary");
  synth_cmd->add_option("--regime", synth_regime, "shared | individual");
  synth_cmd->add_option("--subjects", synth_subjects,
                        "subjects per language (0 = scenario default)");
  synth_cmd->add_option("--sentences", synth_sentences,
                        "sentences per batch (0 = scenario default)");
  synth_cmd->add_option("--seed", seed, "rng seed (GAZE_NLI_SEED overrides)");
  add_out(synth_cmd);

  CLI::App* featurize_cmd =
      app.add_subcommand("featurize", "build and dump a feature matrix");
  add_data(featurize_cmd);
  add_features(featurize_cmd);
  add_out(featurize_cmd);

  CLI::App* cv_cmd =
      app.add_subcommand("cv", "k-fold cross-validated accuracy");
  add_data(cv_cmd);
  add_features(cv_cmd);
  add_train(cv_cmd);
  add_cv(cv_cmd);
  cv_cmd->add_flag("--no-stratify", no_stratify, "plain random folds");
  add_out(cv_cmd);

  CLI::App* binary_cmd =
      app.add_subcommand("binary", "binary task for one language pair");
  add_data(binary_cmd);
  add_features(binary_cmd);
  add_train(binary_cmd);
  add_cv(binary_cmd);
  binary_cmd->add_option("--pair", pair_arg, "LabelA,LabelB")->required();
  add_out(binary_cmd);

  CLI::App* ers_cmd = app.add_subcommand(
      "ers", "classifier-uncertainty similarity between languages");
  add_data(ers_cmd);
  add_features(ers_cmd);
  add_train(ers_cmd);
  add_cv(ers_cmd);
  add_out(ers_cmd);

  CLI::App* lingsim_cmd = app.add_subcommand(
      "lingsim", "typological similarity from a feature table");
  lingsim_cmd->add_option("--typology", typology_path, "typology.tsv")
      ->required();
  lingsim_cmd->add_option("--knn", knn_k, "neighbours for imputation");
  add_out(lingsim_cmd);

  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "ward tree from a similarity matrix");
  cluster_cmd->add_option("--similarity", similarity_path,
                          "similarity matrix tsv");
  cluster_cmd->add_option("--typology", typology_path, "typology.tsv");
  cluster_cmd->add_option("--knn", knn_k, "neighbours for imputation");
  add_out(cluster_cmd);

  CLI::App* correlate_cmd = app.add_subcommand(
      "correlate", "reading similarity against typological similarity");
  add_data(correlate_cmd);
  add_features(correlate_cmd);
  add_train(correlate_cmd);
  add_cv(correlate_cmd);
  correlate_cmd->add_option("--typology", typology_path, "typology.tsv");
  correlate_cmd->add_option("--similarity", similarity_path,
                            "similarity matrix tsv");
  correlate_cmd->add_option("--knn", knn_k, "neighbours for imputation");
  add_out(correlate_cmd);

  CLI::App* report_cmd =
      app.add_subcommand("report", "full pipeline with every section");
  add_data(report_cmd);
  add_features(report_cmd);
  add_train(report_cmd);
  add_cv(report_cmd);
  report_cmd->add_option("--typology", typology_path, "typology.tsv");
  report_cmd->add_option("--similarity", similarity_path,
                         "similarity matrix tsv");
  report_cmd->add_option("--knn", knn_k, "neighbours for imputation");
  report_cmd->add_option("--native-label", native_label,
                         "label anchoring the weight analysis");
  report_cmd->add_option("--top-k", top_k, "weights per direction");
  add_out(report_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(data);
    if (synth_cmd->parsed()) {
      return cmd_synth(scenario_name, synth_regime, synth_subjects,
                       synth_sentences, effective_seed(seed), out);
    }
    if (featurize_cmd->parsed()) return cmd_featurize(data, fs, out);
    if (cv_cmd->parsed()) {
      return cmd_cv(data, fs, tr, folds, seed, no_stratify, out);
    }
    if (binary_cmd->parsed()) {
      return cmd_binary(data, fs, tr, pair_arg, folds, seed, out);
    }
    if (ers_cmd->parsed()) return cmd_ers(data, fs, tr, folds, seed, out);
    if (lingsim_cmd->parsed()) return cmd_lingsim(typology_path, knn_k, out);
    if (cluster_cmd->parsed()) {
      return cmd_cluster(similarity_path, typology_path, knn_k, out);
    }
    if (correlate_cmd->parsed()) {
      return cmd_correlate(data, fs, tr, folds, seed, typology_path,
                           similarity_path, knn_k, out);
    }
    if (report_cmd->parsed()) {
      return cmd_report(data, fs, tr, folds, seed, typology_path,
                        similarity_path, knn_k, native_label, top_k, out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
