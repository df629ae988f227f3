#include "gazenli/lingsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "gazenli/errors.hpp"
#include "gazenli/tsv.hpp"

namespace gazenli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Cosine over mutually observed dimensions; nullopt when there is no usable
/// co-observation (no shared dims, or a zero sub-vector).
std::optional<double> mutual_cosine(
    const std::vector<std::optional<double>>& a,
    const std::vector<std::optional<double>>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) {
      any = true;
      dot += *a[i] * *b[i];
      na += *a[i] * *a[i];
      nb += *b[i] * *b[i];
    }
  }
  if (!any || na == 0.0 || nb == 0.0) return std::nullopt;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

ImputeResult impute_knn(const TypologyTable& table, int k) {
  if (k < 1) throw ConfigError("knn imputation needs k >= 1");
  const std::size_t n = table.languages.size();
  if (n == 0) throw ConfigError("typology table has no languages");

  for (std::size_t i = 0; i < n; ++i) {
    bool any = std::any_of(table.values[i].begin(), table.values[i].end(),
                           [](const auto& c) { return c.has_value(); });
    if (!any) {
      throw IntegrityError("language '" + table.languages[i] +
                           "' has no observed features");
    }
  }

  ImputeResult out;

  // Features observed nowhere cannot be imputed; drop them.
  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < table.feature_names.size(); ++f) {
    bool observed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (table.values[i][f]) observed = true;
    }
    if (observed) {
      kept.push_back(f);
      out.feature_names.push_back(table.feature_names[f]);
    } else {
      out.dropped_features.push_back(table.feature_names[f]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    LanguageVector v;
    v.language = table.languages[i];
    for (std::size_t fi = 0; fi < kept.size(); ++fi) {
      const std::size_t f = kept[fi];
      if (table.values[i][f]) {
        v.values.push_back(*table.values[i][f]);
        continue;
      }
      // Candidate neighbours: languages observing f, ranked by cosine over
      // mutually observed features.
      std::vector<std::pair<double, std::size_t>> candidates;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !table.values[j][f]) continue;
        auto sim = mutual_cosine(table.values[i], table.values[j]);
        if (sim) candidates.emplace_back(*sim, j);
      }
      double imputed;
      if (candidates.empty()) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (table.values[j][f]) {
            sum += *table.values[j][f];
            ++cnt;
          }
        }
        imputed = sum / static_cast<double>(cnt);  // feature's global mean
      } else {
        std::sort(candidates.begin(), candidates.end(),
                  [](const auto& a, const auto& b) {
                    if (a.first != b.first) return a.first > b.first;
                    return a.second < b.second;
                  });
        const std::size_t take =
            std::min<std::size_t>(static_cast<std::size_t>(k),
                                  candidates.size());
        double sum = 0.0;
        for (std::size_t t = 0; t < take; ++t) {
          sum += *table.values[candidates[t].second][f];
        }
        imputed = sum / static_cast<double>(take);
      }
      v.values.push_back(imputed);
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

TruncateResult truncate_constant(const std::vector<LanguageVector>& vectors) {
  if (vectors.size() < 2) {
    throw ConfigError("constant-feature truncation needs >= 2 languages");
  }
  const std::size_t dims = vectors[0].values.size();
  for (const auto& v : vectors) {
    if (v.values.size() != dims) {
      throw ShapeError("language vectors have unequal dimensions");
    }
  }

  TruncateResult out;
  for (std::size_t f = 0; f < dims; ++f) {
    bool constant = true;
    for (std::size_t i = 1; i < vectors.size(); ++i) {
      if (vectors[i].values[f] != vectors[0].values[f]) {
        constant = false;
        break;
      }
    }
    if (!constant) out.kept.push_back(f);
  }
  if (out.kept.empty()) {
    throw EmptyFeatureError(
        "all dimensions are constant across languages; nothing survives "
        "truncation");
  }
  for (const auto& v : vectors) {
    LanguageVector lv;
    lv.language = v.language;
    for (std::size_t f : out.kept) lv.values.push_back(v.values[f]);
    out.vectors.push_back(std::move(lv));
  }
  return out;
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine similarity of unequal-length vectors");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw NumericError("cosine similarity of a zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimilarityMatrix similarity_from_vectors(const std::vector<LanguageVector>& vs) {
  SimilarityMatrix m;
  for (const auto& v : vs) m.labels.push_back(v.language);
  const std::size_t n = vs.size();
  m.values.assign(n * n, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double s = cosine_similarity(vs[a].values, vs[b].values);
      m.at(a, b) = s;
      m.at(b, a) = s;
    }
  }
  return m;
}

Dendrogram ward_tree(const SimilarityMatrix& similarity) {
  const std::size_t n = similarity.labels.size();
  if (n < 2) throw ConfigError("ward clustering needs >= 2 languages");
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (std::fabs(similarity.at(a, b) - similarity.at(b, a)) > 1e-9) {
        throw IntegrityError("similarity matrix is asymmetric at (" +
                             similarity.labels[a] + ", " +
                             similarity.labels[b] + ")");
      }
    }
  }

  Dendrogram tree;
  tree.leaf_names = similarity.labels;

  // Active clusters by id; ids n.. are merge products. Distances follow the
  // Lance-Williams update for Ward's criterion on d = 1 - s.
  std::vector<int> active;
  std::map<std::pair<int, int>, double> dist;
  std::map<int, std::size_t> size;
  for (std::size_t i = 0; i < n; ++i) {
    active.push_back(static_cast<int>(i));
    size[static_cast<int>(i)] = 1;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      dist[{static_cast<int>(a), static_cast<int>(b)}] =
          1.0 - similarity.at(a, b);
    }
  }
  auto d_of = [&dist](int a, int b) {
    return dist.at({std::min(a, b), std::max(a, b)});
  };

  int next_id = static_cast<int>(n);
  while (active.size() > 1) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const int a = std::min(active[i], active[j]);
        const int b = std::max(active[i], active[j]);
        const double d = d_of(a, b);
        if (d < best || (d == best && std::make_pair(a, b) <
                                          std::make_pair(best_a, best_b))) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    }

    tree.merges.push_back(Merge{best_a, best_b, best});
    const double nab = static_cast<double>(size[best_a] + size[best_b]);
    for (int c : active) {
      if (c == best_a || c == best_b) continue;
      const double nc = static_cast<double>(size[c]);
      const double d_new =
          ((static_cast<double>(size[best_a]) + nc) * d_of(best_a, c) +
           (static_cast<double>(size[best_b]) + nc) * d_of(best_b, c) -
           nc * best) /
          (nab + nc);
      dist[{std::min(c, next_id), std::max(c, next_id)}] = d_new;
    }
    size[next_id] = size[best_a] + size[best_b];
    active.erase(std::remove(active.begin(), active.end(), best_a),
                 active.end());
    active.erase(std::remove(active.begin(), active.end(), best_b),
                 active.end());
    active.push_back(next_id);
    ++next_id;
  }

  // Left-to-right leaf order.
  std::vector<int> stack = {next_id - 1};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id < static_cast<int>(n)) {
      tree.leaf_order.push_back(id);
    } else {
      const Merge& m = tree.merges[id - static_cast<int>(n)];
      stack.push_back(m.b);  // a expands first
      stack.push_back(m.a);
    }
  }
  return tree;
}

std::vector<std::vector<int>> Dendrogram::cut(int n_clusters) const {
  const int n = static_cast<int>(leaf_names.size());
  if (n_clusters < 1 || n_clusters > n) {
    throw ConfigError("cut into " + std::to_string(n_clusters) +
                      " clusters is impossible for " + std::to_string(n) +
                      " leaves");
  }
  // Apply the first n - n_clusters merges to a union of leaf sets.
  std::map<int, std::vector<int>> members;
  for (int i = 0; i < n; ++i) members[i] = {i};
  for (int s = 0; s < n - n_clusters; ++s) {
    const Merge& m = merges[s];
    std::vector<int> merged = members.at(m.a);
    const auto& right = members.at(m.b);
    merged.insert(merged.end(), right.begin(), right.end());
    std::sort(merged.begin(), merged.end());
    members.erase(m.a);
    members.erase(m.b);
    members[n + s] = std::move(merged);
  }
  std::vector<std::vector<int>> out;
  for (auto& [id, leaves] : members) out.push_back(std::move(leaves));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string newick_node(const Dendrogram& t, int id, double parent_height) {
  const int n = static_cast<int>(t.leaf_names.size());
  double own_height = 0.0;
  std::string body;
  if (id < n) {
    body = t.leaf_names[id];
  } else {
    const Merge& m = t.merges[id - n];
    own_height = m.height;
    body = "(" + newick_node(t, m.a, own_height) + "," +
           newick_node(t, m.b, own_height) + ")";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", parent_height - own_height);
  return body + ":" + buf;
}

}  // namespace

std::string to_newick(const Dendrogram& tree) {
  const Merge& root = tree.merges.back();
  return "(" + newick_node(tree, root.a, root.height) + "," +
         newick_node(tree, root.b, root.height) + ");";
}

namespace {

std::vector<double> ranks_with_ties(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return kNan;  // degenerate: constant input
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

PairCorrelation pair_correlation(const ErsMatrix& ers,
                                 const SimilarityMatrix& ls) {
  std::set<std::string> a(ers.labels.begin(), ers.labels.end());
  std::set<std::string> b(ls.labels.begin(), ls.labels.end());
  if (a != b) throw ConfigError("ers and ls label sets differ");
  if (a.size() < 3) {
    throw ConfigError("pair correlation needs >= 3 languages");
  }

  std::map<std::string, std::size_t> ers_idx, ls_idx;
  for (std::size_t i = 0; i < ers.labels.size(); ++i) ers_idx[ers.labels[i]] = i;
  for (std::size_t i = 0; i < ls.labels.size(); ++i) ls_idx[ls.labels[i]] = i;

  std::vector<std::string> sorted(a.begin(), a.end());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      ys.push_back(ers.at(ers_idx[sorted[i]], ers_idx[sorted[j]]));
      xs.push_back(ls.at(ls_idx[sorted[i]], ls_idx[sorted[j]]));
    }
  }

  PairCorrelation out;
  out.pair_count = static_cast<int>(xs.size());
  out.pearson = pearson(xs, ys);
  out.spearman = pearson(ranks_with_ties(xs), ranks_with_ties(ys));
  return out;
}

void write_similarity(const std::string& path, const SimilarityMatrix& m) {
  std::vector<std::string> header = {"language"};
  header.insert(header.end(), m.labels.begin(), m.labels.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    std::vector<std::string> row = {m.labels[i]};
    for (std::size_t j = 0; j < m.labels.size(); ++j) {
      row.push_back(tsv::format_full(m.at(i, j)));
    }
    rows.push_back(std::move(row));
  }
  tsv::write_file(path, header, rows);
}

SimilarityMatrix read_similarity(const std::string& path) {
  tsv::RaggedFile f = tsv::read_file_any_header(path);
  if (f.header.empty() || f.header[0] != "language") {
    throw ParseError("first column of " + path + " must be 'language'", 1);
  }
  SimilarityMatrix m;
  m.labels.assign(f.header.begin() + 1, f.header.end());
  const std::size_t n = m.labels.size();
  if (f.rows.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " rows in " + path,
                     f.rows.empty() ? 1 : f.rows.back().line);
  }
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = f.rows[i];
    if (row.cells.size() != n + 1 || row.cells[0] != m.labels[i]) {
      throw ParseError("similarity row order must match the header", row.line);
    }
    for (std::size_t j = 0; j < n; ++j) {
      m.at(i, j) = tsv::parse_real(row.cells[j + 1], row.line, "similarity");
    }
  }
  return m;
}

}  // namespace gazenli
