#pragma once

// Exhaustive greedy Ward oracle, independent of the library's Lance-Williams
// implementation. Treats d = 1 - s as a squared-Euclidean surrogate and
// recomputes every candidate merge cost from the ORIGINAL matrix through the
// centroid identity:
//   ||cA - cB||^2 = mean_cross(A,B) - mean_within(A)/2 - mean_within(B)/2
//   cost(A,B)     = 2 |A||B| / (|A|+|B|) * ||cA - cB||^2
// where mean_within averages over all ordered pairs (self pairs included).

#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "gazenli/lingsim.hpp"

namespace testutil {

struct OracleMerge {
  int a;
  int b;
  double height;
};

inline std::vector<OracleMerge> ward_oracle(
    const gazenli::SimilarityMatrix& sim) {
  const int n = static_cast<int>(sim.labels.size());
  auto d0 = [&sim](int i, int j) {
    return i == j ? 0.0 : 1.0 - sim.at(static_cast<std::size_t>(i),
                                       static_cast<std::size_t>(j));
  };

  std::map<int, std::vector<int>> members;
  for (int i = 0; i < n; ++i) members[i] = {i};

  auto mean_cross = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double sum = 0.0;
    for (int x : a) {
      for (int y : b) sum += d0(x, y);
    }
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  };

  std::vector<OracleMerge> merges;
  int next_id = n;
  while (members.size() > 1) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (auto ia = members.begin(); ia != members.end(); ++ia) {
      for (auto ib = std::next(ia); ib != members.end(); ++ib) {
        const auto& A = ia->second;
        const auto& B = ib->second;
        const double centroid_gap =
            mean_cross(A, B) - 0.5 * mean_cross(A, A) - 0.5 * mean_cross(B, B);
        const double na = static_cast<double>(A.size());
        const double nb = static_cast<double>(B.size());
        const double cost = 2.0 * na * nb / (na + nb) * centroid_gap;
        if (cost < best ||
            (cost == best &&
             std::make_pair(ia->first, ib->first) < std::make_pair(best_a, best_b))) {
          best = cost;
          best_a = ia->first;
          best_b = ib->first;
        }
      }
    }
    std::vector<int> merged = members[best_a];
    merged.insert(merged.end(), members[best_b].begin(), members[best_b].end());
    members.erase(best_a);
    members.erase(best_b);
    members[next_id++] = std::move(merged);
    merges.push_back(OracleMerge{best_a, best_b, best});
  }
  return merges;
}

}  // namespace testutil
