#pragma once

#include <functional>
#include <vector>

namespace gazenli {

/// Objective callback: fills `grad` (same size as `x`) and returns f(x).
using Objective =
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

struct LbfgsOptions {
  int memory = 10;                 // correction pairs kept
  double gradient_tolerance = 1e-6;  // stop when ||g||_2 <= tolerance
  int max_iterations = 500;
  double armijo_c1 = 1e-4;   // sufficient-decrease constant
  double curvature_c2 = 0.9;  // Wolfe curvature constant
  int max_line_search_steps = 50;
};

struct LbfgsResult {
  std::vector<double> x;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;  // gradient tolerance reached
};

/// Limited-memory BFGS with the two-loop recursion and a bracketing line
/// search that enforces the sufficient-decrease and curvature (strong Wolfe)
/// conditions. Deterministic for a given objective and start point.
/// Throws NumericError if the objective turns non-finite.
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                           const LbfgsOptions& opt = {});

}  // namespace gazenli
