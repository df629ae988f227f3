#pragma once

#include <string>
#include <vector>

#include "gazenli/corpus.hpp"
#include "gazenli/eval.hpp"

namespace gazenli {

struct LanguageVector {
  std::string language;
  std::vector<double> values;  // no missing entries after imputation
};

struct SimilarityMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // |L| x |L|, symmetric, diagonal 1

  double at(std::size_t a, std::size_t b) const {
    return values[a * labels.size() + b];
  }
  double& at(std::size_t a, std::size_t b) {
    return values[a * labels.size() + b];
  }
};

/// Fills each missing cell with the mean of that feature over the k nearest
/// languages, nearness being cosine similarity over mutually observed
/// features. Languages without any usable co-observation fall back to the
/// feature's global mean. Features missing for every language are dropped
/// and reported.
struct ImputeResult {
  std::vector<LanguageVector> vectors;
  std::vector<std::string> feature_names;     // surviving features
  std::vector<std::string> dropped_features;  // missing everywhere
};
ImputeResult impute_knn(const TypologyTable& table, int k);

/// Removes dimensions where every language shares one value; survivor order
/// is preserved. Idempotent. Throws EmptyFeatureError if nothing survives.
struct TruncateResult {
  std::vector<LanguageVector> vectors;
  std::vector<std::size_t> kept;  // indices into the input dimensions
};
TruncateResult truncate_constant(const std::vector<LanguageVector>& vectors);

/// v . v' / (|v| |v'|). Throws ShapeError on length mismatch, NumericError
/// on a zero vector.
double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

/// Pairwise cosine similarities of the given vectors; diagonal 1.
SimilarityMatrix similarity_from_vectors(const std::vector<LanguageVector>& vs);

/// Agglomeration record: clusters 0..n-1 are leaves, each merge creates
/// cluster n+i. Heights are non-decreasing.
struct Merge {
  int a = 0;
  int b = 0;  // a < b
  double height = 0.0;
};
struct Dendrogram {
  std::vector<std::string> leaf_names;
  std::vector<Merge> merges;       // exactly n-1
  std::vector<int> leaf_order;     // left-to-right traversal

  /// The two top-level subtrees' leaf sets, smallest-index first. Handy for
  /// topology checks.
  std::vector<std::vector<int>> cut(int n_clusters) const;
};

/// Ward hierarchical clustering of a similarity matrix. Dissimilarity is
/// 1 - s, treated as a squared-Euclidean surrogate; cluster distances follow
/// the Lance-Williams update for Ward's criterion. Ties break toward the
/// smallest (a, b) pair. Throws IntegrityError when the input is asymmetric
/// beyond 1e-9.
Dendrogram ward_tree(const SimilarityMatrix& similarity);

/// Newick serialization with merge heights as branch lengths, e.g.
/// "((Portuguese:0.1,Spanish:0.1):0.4,(Chinese:0.2,Japanese:0.2):0.3);".
std::string to_newick(const Dendrogram& tree);

/// Pearson and Spearman correlation over the C(n,2) unordered language pairs
/// of two aligned matrices. Degenerate (constant) inputs produce NaN.
struct PairCorrelation {
  double pearson = 0.0;
  double spearman = 0.0;
  int pair_count = 0;
};
PairCorrelation pair_correlation(const ErsMatrix& ers,
                                 const SimilarityMatrix& ls);

/// TSV with language headers (first cell "language").
void write_similarity(const std::string& path, const SimilarityMatrix& m);
SimilarityMatrix read_similarity(const std::string& path);

}  // namespace gazenli
