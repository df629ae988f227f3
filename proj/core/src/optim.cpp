#include "gazenli/optim.hpp"

#include <cmath>
#include <deque>

#include "gazenli/errors.hpp"

namespace gazenli {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct Correction {
  std::vector<double> s;  // x_{k+1} - x_k
  std::vector<double> y;  // g_{k+1} - g_k
  double rho = 0.0;       // 1 / (y . s)
};

struct ProbePoint {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative g . d
  std::vector<double> x;
  std::vector<double> g;
  bool finite = false;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                           const LbfgsOptions& opt) {
  const std::size_t n = x0.size();
  std::vector<double> g(n, 0.0);
  double fx = f(x0, g);
  if (!std::isfinite(fx)) {
    throw NumericError("objective non-finite at the starting point");
  }

  LbfgsResult res;
  res.x = std::move(x0);
  res.objective = fx;

  std::deque<Correction> history;
  std::vector<double> direction(n);

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.gradient_norm = norm2(g);
    res.iterations = iter;
    if (res.gradient_norm <= opt.gradient_tolerance) {
      res.converged = true;
      return res;
    }

    // Two-loop recursion: direction = -H g.
    std::vector<double> q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      const Correction& c = history[i];
      alpha[i] = c.rho * dot(c.s, q);
      for (std::size_t j = 0; j < n; ++j) q[j] -= alpha[i] * c.y[j];
    }
    double gamma = 1.0;
    if (!history.empty()) {
      const Correction& last = history.back();
      gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (std::size_t j = 0; j < n; ++j) q[j] *= gamma;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const Correction& c = history[i];
      double beta = c.rho * dot(c.y, q);
      for (std::size_t j = 0; j < n; ++j) q[j] += (alpha[i] - beta) * c.s[j];
    }
    for (std::size_t j = 0; j < n; ++j) direction[j] = -q[j];

    double slope0 = dot(g, direction);
    if (!(slope0 < 0.0)) {
      // Curvature information went stale; restart from steepest descent.
      history.clear();
      for (std::size_t j = 0; j < n; ++j) direction[j] = -g[j];
      slope0 = dot(g, direction);
    }

    auto probe = [&](double step) {
      ProbePoint p;
      p.step = step;
      p.x.resize(n);
      p.g.assign(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) p.x[j] = res.x[j] + step * direction[j];
      p.value = f(p.x, p.g);
      p.finite = std::isfinite(p.value);
      p.slope = p.finite ? dot(p.g, direction) : 0.0;
      return p;
    };

    // Strong-Wolfe line search: bracket then zoom. Non-finite trial values
    // are treated as beyond the bracket's high side.
    const double c1 = opt.armijo_c1;
    const double c2 = opt.curvature_c2;
    auto armijo_ok = [&](const ProbePoint& p) {
      return p.finite && p.value <= res.objective + c1 * p.step * slope0;
    };
    auto curvature_ok = [&](const ProbePoint& p) {
      return p.finite && std::fabs(p.slope) <= -c2 * slope0;
    };

    int evals = 0;
    ProbePoint accepted;
    accepted.finite = false;
    ProbePoint lo;  // bracket side with sufficient decrease
    lo.step = 0.0;
    lo.value = res.objective;
    lo.slope = slope0;
    lo.x = res.x;
    lo.g = g;
    lo.finite = true;

    double step = history.empty() ? std::min(1.0, 1.0 / (1.0 + res.gradient_norm))
                                  : 1.0;
    ProbePoint prev = lo;
    bool bracketed = false;
    ProbePoint hi;

    while (evals < opt.max_line_search_steps) {
      ProbePoint p = probe(step);
      ++evals;
      if (!p.finite || !armijo_ok(p) || (evals > 1 && p.value >= prev.value)) {
        lo = prev;
        hi = p;
        bracketed = true;
        break;
      }
      if (curvature_ok(p)) {
        accepted = std::move(p);
        break;
      }
      if (p.slope >= 0.0) {
        lo = p;
        hi = prev;
        bracketed = true;
        break;
      }
      prev = p;
      step *= 2.0;
    }

    if (!accepted.finite && bracketed) {
      while (evals < opt.max_line_search_steps) {
        double mid = 0.5 * (lo.step + hi.step);
        ProbePoint p = probe(mid);
        ++evals;
        if (!p.finite || !armijo_ok(p) || p.value >= lo.value) {
          hi = p;
        } else {
          if (curvature_ok(p)) {
            accepted = std::move(p);
            break;
          }
          if (p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
          lo = p;
        }
        if (std::fabs(hi.step - lo.step) <
            1e-16 * std::max(1.0, std::fabs(lo.step))) {
          break;
        }
      }
      // Curvature unreachable within budget: fall back to the best point
      // with sufficient decrease.
      if (!accepted.finite && lo.step > 0.0 && armijo_ok(lo)) {
        accepted = lo;
      }
    }

    if (!accepted.finite) {
      bool any_finite_trial = bracketed ? hi.finite : true;
      if (!any_finite_trial) {
        throw NumericError("objective non-finite during line search at iteration " +
                           std::to_string(iter));
      }
      // No acceptable step: gradient is as converged as this search can get.
      res.iterations = iter;
      return res;
    }

    Correction c;
    c.s.resize(n);
    c.y.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      c.s[j] = accepted.x[j] - res.x[j];
      c.y[j] = accepted.g[j] - g[j];
    }
    double sy = dot(c.s, c.y);
    if (sy > 1e-12 * norm2(c.s) * norm2(c.y)) {
      c.rho = 1.0 / sy;
      history.push_back(std::move(c));
      if (static_cast<int>(history.size()) > opt.memory) history.pop_front();
    }

    res.x = std::move(accepted.x);
    g = std::move(accepted.g);
    res.objective = accepted.value;
    if (!std::isfinite(res.objective)) {
      throw NumericError("objective non-finite at iteration " +
                         std::to_string(iter));
    }
  }

  res.gradient_norm = norm2(g);
  res.iterations = opt.max_iterations;
  res.converged = res.gradient_norm <= opt.gradient_tolerance;
  return res;
}

}  // namespace gazenli
