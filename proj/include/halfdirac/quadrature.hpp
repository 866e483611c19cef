#pragma once

// Composite Gauss-Legendre rules on [0, X] with arbitrary panel breaks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace halfdirac {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n, Chebyshev start).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  const int n = order;
  if (n == 1) return {{0.0}, {2.0}};
  // P_n(t) and P_n'(t) by the three-term recurrence
  auto legendre = [n](double t) {
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (t * p1 - p0) / (t * t - 1.0)};
  };
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(t);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double dp = legendre(t).second;
    const double wi = 2.0 / ((1.0 - t * t) * dp * dp);
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {std::move(x), std::move(w)};
}

/**
 * Composite Gauss-Legendre grid. `breaks` are the panel endpoints
 * (strictly increasing); each panel carries `order` interior nodes.
 */
struct QuadGrid {
  std::vector<double> breaks;
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> ref_nodes;    // on [-1, 1]
  std::vector<double> ref_weights;  // on [-1, 1]

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t panels() const noexcept { return breaks.empty() ? 0 : breaks.size() - 1; }
  double lower() const { return breaks.front(); }
  double upper() const { return breaks.back(); }

  /// Same rule with every panel bisected.
  QuadGrid refined() const;

  /// Visits (y, w) for a quadrature of [lower, upper] whose panel containing
  /// `split` is cut in two at `split`. Exact pieces for integrands with a
  /// kink or jump at y = split.
  template <class F>
  void for_each_split(double split, F&& visit) const {
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double a = breaks[p], b = breaks[p + 1];
      if (split > a && split < b) {
        visit_panel(a, split, visit);
        visit_panel(split, b, visit);
      } else {
        visit_panel(a, b, visit);
      }
    }
  }

  /// Like for_each_split, restricted to [lower, split] or [split, upper].
  template <class F>
  void for_each_below(double split, F&& visit) const {
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double a = breaks[p], b = std::min(breaks[p + 1], split);
      if (b <= a) break;
      visit_panel(a, b, visit);
    }
  }
  template <class F>
  void for_each_above(double split, F&& visit) const {
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double a = std::max(breaks[p], split), b = breaks[p + 1];
      if (b <= a) continue;
      visit_panel(a, b, visit);
    }
  }

 private:
  template <class F>
  void visit_panel(double a, double b, F& visit) const {
    if (b <= a) return;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref_nodes.size(); ++i) {
      visit(mid + half * ref_nodes[i], half * ref_weights[i]);
    }
  }
};

inline QuadGrid make_grid_on(std::vector<double> breaks, int order) {
  if (order < 2 || order > 64) {
    throw std::invalid_argument("quadrature order must lie in [2, 64]");
  }
  if (breaks.size() < 2) throw std::invalid_argument("quadrature grid needs at least one panel");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i]) || !std::isfinite(breaks[i + 1])) {
      throw std::invalid_argument("panel breaks must be finite and strictly increasing");
    }
  }
  QuadGrid g;
  g.order = order;
  auto [rx, rw] = gauss_legendre(order);
  g.ref_nodes = std::move(rx);
  g.ref_weights = std::move(rw);
  g.breaks = std::move(breaks);
  g.nodes.reserve(g.panels() * order);
  g.weights.reserve(g.panels() * order);
  g.for_each_split(g.breaks.front(), [&](double y, double w) {
    g.nodes.push_back(y);
    g.weights.push_back(w);
  });
  return g;
}

/// `panels` uniform panels on [0, X].
inline QuadGrid make_grid(double X, int panels, int order) {
  if (!(X > 0.0) || !std::isfinite(X)) throw std::invalid_argument("make_grid: X must be > 0");
  if (panels < 1) throw std::invalid_argument("make_grid: panels must be >= 1");
  std::vector<double> b(panels + 1);
  for (int i = 0; i <= panels; ++i) b[i] = X * i / panels;
  b.back() = X;
  return make_grid_on(std::move(b), order);
}

inline QuadGrid QuadGrid::refined() const {
  std::vector<double> b;
  b.reserve(2 * breaks.size());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    b.push_back(breaks[i]);
    b.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  }
  b.push_back(breaks.back());
  return make_grid_on(std::move(b), order);
}

}  // namespace halfdirac
