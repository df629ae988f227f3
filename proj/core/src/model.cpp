#include "gazenli/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gazenli/errors.hpp"
#include "gazenli/optim.hpp"
#include "gazenli/tsv.hpp"

namespace gazenli {

LabelSpace LabelSpace::from_labels(const std::vector<std::string>& raw) {
  std::set<std::string> unique(raw.begin(), raw.end());
  if (unique.size() < 2) {
    throw ConfigError("label space needs at least 2 distinct labels, got " +
                      std::to_string(unique.size()));
  }
  LabelSpace ys;
  ys.labels.assign(unique.begin(), unique.end());  // lexicographic order
  return ys;
}

std::size_t LabelSpace::index_of(const std::string& label) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) {
    throw ConfigError("label '" + label + "' not in label space");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

namespace {

/// Scores theta_y . [x; 1] for every label.
void scores_for(const std::vector<double>& weights, std::size_t n_labels,
                std::size_t n_features, const double* x,
                std::vector<double>& scores) {
  const std::size_t stride = n_features + 1;
  scores.assign(n_labels, 0.0);
  for (std::size_t y = 0; y < n_labels; ++y) {
    const double* w = weights.data() + y * stride;
    double s = w[n_features];  // bias
    for (std::size_t j = 0; j < n_features; ++j) s += w[j] * x[j];
    scores[y] = s;
  }
}

/// In-place softmax with max subtraction; returns log(sum exp(s - max)).
double softmax_inplace(std::vector<double>& scores) {
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return std::log(sum);
}

}  // namespace

std::vector<double> predict_proba(const ModelParams& params, const double* x,
                                  std::size_t n_features) {
  if (n_features != params.n_features()) {
    throw ShapeError("feature count mismatch: model has " +
                     std::to_string(params.n_features()) + ", input has " +
                     std::to_string(n_features));
  }
  for (std::size_t j = 0; j < n_features; ++j) {
    if (!std::isfinite(x[j])) {
      throw NumericError("non-finite feature value at column " +
                         std::to_string(j));
    }
  }
  std::vector<double> probs;
  scores_for(params.weights, params.n_labels(), n_features, x, probs);
  softmax_inplace(probs);
  return probs;
}

std::vector<double> predict_proba(const ModelParams& params,
                                  const std::vector<double>& x) {
  return predict_proba(params, x.data(), x.size());
}

std::string predict(const ModelParams& params, const double* x,
                    std::size_t n_features) {
  std::vector<double> probs = predict_proba(params, x, n_features);
  std::size_t best = 0;
  for (std::size_t y = 1; y < probs.size(); ++y) {
    if (probs[y] > probs[best]) best = y;  // ties keep the earlier label
  }
  return params.labels[best];
}

ObjectiveValue nll_and_gradient(const std::vector<double>& weights,
                                const FeatureMatrix& m, const LabelSpace& ys,
                                double l2_lambda) {
  const std::size_t n_labels = ys.size();
  const std::size_t n_features = m.cols();
  const std::size_t stride = n_features + 1;
  if (weights.size() != n_labels * stride) {
    throw ShapeError("weight vector has wrong size");
  }

  ObjectiveValue out;
  out.gradient.assign(weights.size(), 0.0);

  std::vector<double> probs;  // holds scores, then probabilities in place
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* x = m.row(r);
    scores_for(weights, n_labels, n_features, x, probs);
    const std::size_t yi = ys.index_of(m.labels[r]);
    const double score_true = probs[yi];
    double mx = probs[0];
    for (double s : probs) mx = std::max(mx, s);
    const double logsum = softmax_inplace(probs);
    out.objective -= score_true - mx - logsum;  // -log p(y_i | x_i)

    for (std::size_t y = 0; y < n_labels; ++y) {
      const double coeff = probs[y] - (y == yi ? 1.0 : 0.0);
      double* gy = out.gradient.data() + y * stride;
      for (std::size_t j = 0; j < n_features; ++j) gy[j] += coeff * x[j];
      gy[n_features] += coeff;
    }
  }

  if (l2_lambda > 0.0) {
    double penalty = 0.0;
    for (std::size_t y = 0; y < n_labels; ++y) {
      for (std::size_t j = 0; j < n_features; ++j) {  // bias unregularized
        const double w = weights[y * stride + j];
        penalty += w * w;
        out.gradient[y * stride + j] += l2_lambda * w;
      }
    }
    out.objective += 0.5 * l2_lambda * penalty;
  }

  if (!std::isfinite(out.objective)) {
    throw NumericError("objective is non-finite");
  }
  return out;
}

TrainResult train(const FeatureMatrix& m, const LabelSpace& ys,
                  const TrainConfig& cfg,
                  const std::vector<double>* initial_weights) {
  if (m.rows() == 0) throw ConfigError("cannot train on an empty matrix");
  TrainResult result;

  std::set<std::string> present(m.labels.begin(), m.labels.end());
  for (const auto& y : ys.labels) {
    if (!present.count(y)) {
      result.warnings.push_back("label '" + y + "' has no training rows");
    }
  }
  for (const auto& l : m.labels) {
    ys.index_of(l);  // rows outside the label space are a caller bug
  }

  const std::size_t size = ys.size() * (m.cols() + 1);
  std::vector<double> x0(size, 0.0);
  if (initial_weights) {
    if (initial_weights->size() != size) {
      throw ShapeError("initial weights have wrong size");
    }
    x0 = *initial_weights;
  }

  Objective objective = [&](const std::vector<double>& w,
                            std::vector<double>& grad) {
    ObjectiveValue v = nll_and_gradient(w, m, ys, cfg.l2_lambda);
    grad = std::move(v.gradient);
    return v.objective;
  };

  {
    std::vector<double> g0(size, 0.0);
    result.initial_objective = objective(x0, g0);
  }

  LbfgsOptions opt;
  opt.memory = cfg.lbfgs_memory;
  opt.gradient_tolerance = cfg.gradient_tolerance;
  opt.max_iterations = cfg.max_iterations;
  LbfgsResult lr = lbfgs_minimize(objective, x0, opt);

  result.final_objective = lr.objective;
  result.iterations = lr.iterations;
  result.converged = lr.converged;

  result.params.labels = ys.labels;
  result.params.feature_names = m.feature_names;
  result.params.l2_lambda = cfg.l2_lambda;
  result.params.weights = std::move(lr.x);
  return result;
}

void save_model(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "gazenli-model 1\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", params.l2_lambda);
  out << "lambda " << buf << "\n";
  out << "labels " << params.n_labels() << "\n";
  for (const auto& l : params.labels) out << l << "\n";
  out << "features " << params.n_features() << "\n";
  for (const auto& f : params.feature_names) out << f << "\n";
  out << "weights " << params.n_labels() << " " << params.n_features() + 1
      << "\n";
  for (std::size_t y = 0; y < params.n_labels(); ++y) {
    for (std::size_t j = 0; j <= params.n_features(); ++j) {
      if (j) out << ' ';
      std::snprintf(buf, sizeof(buf), "%.12g", params.w(y, j));
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "gazenli-model" || version != 1) {
    throw ParseError("not a gazenli-model file: " + path, 1);
  }
  ModelParams p;
  std::string key;
  std::size_t n_labels = 0, n_features = 0;
  if (!(in >> key >> p.l2_lambda) || key != "lambda") {
    throw ParseError("expected lambda in " + path, 2);
  }
  if (!(in >> key >> n_labels) || key != "labels") {
    throw ParseError("expected labels in " + path, 3);
  }
  in.ignore();
  for (std::size_t i = 0; i < n_labels; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("truncated labels", 3 + i);
    p.labels.push_back(line);
  }
  if (!(in >> key >> n_features) || key != "features") {
    throw ParseError("expected features in " + path, 4 + n_labels);
  }
  in.ignore();
  for (std::size_t i = 0; i < n_features; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("truncated features", 0);
    p.feature_names.push_back(line);
  }
  std::size_t rows = 0, cols = 0;
  if (!(in >> key >> rows >> cols) || key != "weights" || rows != n_labels ||
      cols != n_features + 1) {
    throw ParseError("bad weights header in " + path, 0);
  }
  p.weights.resize(rows * cols);
  for (double& w : p.weights) {
    if (!(in >> w)) throw ParseError("truncated weights in " + path, 0);
  }
  return p;
}

}  // namespace gazenli
