#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazenli/features.hpp"

namespace gazenli {

/// Canonical (lexicographically sorted) native-language label set.
struct LabelSpace {
  std::vector<std::string> labels;

  static LabelSpace from_labels(const std::vector<std::string>& raw);
  std::size_t size() const { return labels.size(); }
  std::size_t index_of(const std::string& label) const;  // throws ConfigError
};

/// Multinomial log-linear model. The class-conditional feature map is the
/// block construction: one weight vector per label over the shared feature
/// vector, plus a per-label bias (last column).
struct ModelParams {
  std::vector<std::string> labels;         // canonical order
  std::vector<std::string> feature_names;  // column order of the weights
  double l2_lambda = 1.0;
  std::vector<double> weights;  // |labels| x (features + 1), row-major

  std::size_t n_labels() const { return labels.size(); }
  std::size_t n_features() const { return feature_names.size(); }
  double& w(std::size_t label, std::size_t col) {
    return weights[label * (n_features() + 1) + col];
  }
  double w(std::size_t label, std::size_t col) const {
    return weights[label * (n_features() + 1) + col];
  }
};

struct TrainConfig {
  double l2_lambda = 1.0;          // on non-bias weights; 0 disables
  int lbfgs_memory = 10;
  double gradient_tolerance = 1e-6;
  int max_iterations = 500;
  std::int64_t seed = 0;  // carried through manifests; training is deterministic
};

/// p(y|x) over the model's label order, computed with max-subtracted
/// exponentials; sums to 1 within 1e-12. Throws ShapeError on dimension
/// mismatch, NumericError on non-finite input.
std::vector<double> predict_proba(const ModelParams& params,
                                  const double* x, std::size_t n_features);
std::vector<double> predict_proba(const ModelParams& params,
                                  const std::vector<double>& x);

/// Argmax label; exact ties resolve to the earliest label in canonical order.
std::string predict(const ModelParams& params, const double* x,
                    std::size_t n_features);

/// Negative log-likelihood plus (lambda/2)||theta_nonbias||^2 and its
/// analytic gradient, laid out like ModelParams::weights.
struct ObjectiveValue {
  double objective = 0.0;
  std::vector<double> gradient;
};
ObjectiveValue nll_and_gradient(const std::vector<double>& weights,
                                const FeatureMatrix& m, const LabelSpace& ys,
                                double l2_lambda);

/// L-BFGS training from the given start (zeros by default). The label space
/// may include labels absent from `m` (they keep near-uniform probability
/// mass); a warning is recorded for each. Guaranteed final objective <=
/// initial objective.
struct TrainResult {
  ModelParams params;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};
TrainResult train(const FeatureMatrix& m, const LabelSpace& ys,
                  const TrainConfig& cfg,
                  const std::vector<double>* initial_weights = nullptr);

/// Text persistence: label order, feature order, lambda, weights at 12
/// significant digits. load(save(m)) round-trips bit-exactly at that
/// precision.
void save_model(const std::string& path, const ModelParams& params);
ModelParams load_model(const std::string& path);

}  // namespace gazenli
