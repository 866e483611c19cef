#pragma once

/**
 * @file delta.hpp
 * @brief Bound states of the half-line Dirac operator perturbed by
 *        t delta(x - a) in entry (1,1).
 *
 * With s = sqrt(m^2 - lambda^2), lambda in (-m, m) is an eigenvalue iff
 *
 *   t = -(cot s + m - lambda) e^{as} / (cot (m + lambda) sinh(as) + s cosh(as)).
 *
 * The right-hand side increases from -inf (lambda -> -m) to
 * t0 = -cot/(1 + 2ma cot) (lambda -> m), so a bound state exists iff t < t0
 * and it moves from +m towards -m as t decreases.
 */

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfdirac/core.hpp"
#include "halfdirac/parallel.hpp"

namespace halfdirac {

struct DeltaConfig {
  double t;
  double a;
  SpectralParams params;

  DeltaConfig(double coupling, double position, SpectralParams p) : t(coupling), a(position), params(p) {
    if (!(position > 0.0)) throw std::invalid_argument("delta position a must be > 0");
    if (!(p.m() > 0.0)) throw std::invalid_argument("delta bound states require m > 0");
  }
};

struct EigenResult {
  double lambda;
  double residual;  // |t - implicit_rhs(lambda)|
  std::pair<double, double> bracket;
  int n_brackets;   // sign changes found by the scan
};

namespace detail {

inline void check_delta(double a, const SpectralParams& p) {
  if (!(a > 0.0)) throw std::invalid_argument("delta position a must be > 0");
  if (!(p.m() > 0.0)) throw std::invalid_argument("delta bound states require m > 0");
}

}  // namespace detail

/// Right-hand side of the eigenvalue equation, lambda in (-m, m).
inline double implicit_rhs(double lambda, double a, const SpectralParams& p) {
  detail::check_delta(a, p);
  const double m = p.m(), cot = p.cot_alpha();
  if (!(lambda > -m && lambda < m)) {
    throw std::domain_error("implicit_rhs: lambda must lie in (-m, m)");
  }
  const double s = std::sqrt((m - lambda) * (m + lambda));
  // numerator and denominator divided by s e^{as}
  const double num = cot + s / (m + lambda);
  const double E = std::exp(-2.0 * a * s);
  const double sinh_over_s = -std::expm1(-2.0 * a * s) / (2.0 * s);
  const double den = cot * (m + lambda) * sinh_over_s + 0.5 * (1.0 + E);
  return -num / den;
}

/// 1/sqrt(1 + (q + 2ma)^2); the full certificate passes iff |t| < t_star.
inline double t_star(double a, const SpectralParams& p) {
  detail::check_delta(a, p);
  const double b = p.q() + 2.0 * p.m() * a;
  return 1.0 / std::sqrt(1.0 + b * b);
}

/// -cot/(1 + 2ma cot), the limit of implicit_rhs at lambda -> m.
inline double t_zero(double a, const SpectralParams& p) {
  detail::check_delta(a, p);
  return -p.cot_alpha() / (1.0 + 2.0 * p.m() * a * p.cot_alpha());
}

/// Bound state for coupling t, or nullopt when t >= t0.
inline std::optional<EigenResult> solve_eigenvalue(double t, double a, const SpectralParams& p) {
  detail::check_delta(a, p);
  if (!std::isfinite(t)) throw std::invalid_argument("coupling t must be finite");
  if (t >= t_zero(a, p)) return std::nullopt;
  const double m = p.m();
  const double lo_end = -m + 1e-9 * m, hi_end = m - 1e-9 * m;
  constexpr int panels = 1024;
  auto g = [&](double l) { return implicit_rhs(l, a, p) - t; };

  int n_brackets = 0;
  std::pair<double, double> first{0.0, 0.0};
  double x0 = lo_end, g0 = g(x0);
  for (int i = 1; i <= panels; ++i) {
    const double x1 = i == panels ? hi_end : lo_end + (hi_end - lo_end) * i / panels;
    const double g1 = g(x1);
    if ((g0 <= 0.0) != (g1 <= 0.0)) {
      if (n_brackets == 0) first = {x0, x1};
      ++n_brackets;
    }
    x0 = x1;
    g0 = g1;
  }
  if (n_brackets == 0) {
    throw std::runtime_error("solve_eigenvalue: no sign change on (-m, m) for t = " +
                             std::to_string(t) + " (rhs range [" + std::to_string(g(lo_end) + t) +
                             ", " + std::to_string(g(hi_end) + t) + "], " +
                             std::to_string(panels) + " panels)");
  }

  double lo = first.first, hi = first.second;
  double glo = g(lo);
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) { lo = hi = mid; break; }
    if ((gm <= 0.0) == (glo <= 0.0)) { lo = mid; glo = gm; } else { hi = mid; }
  }
  double lambda = 0.5 * (lo + hi);
  double best = std::abs(g(lambda));
  if (hi > lo) {
    const double ghi = g(hi);
    if (ghi != glo) {
      const double sec = lo - glo * (hi - lo) / (ghi - glo);
      if (sec > lo_end && sec < hi_end) {
        const double gs = std::abs(g(sec));
        if (gs < best) { lambda = sec; best = gs; }
      }
    }
  }
  return EigenResult{lambda, best, first, n_brackets};
}

struct CurvePoint {
  double t;
  double lambda;
};

/// solve_eigenvalue over n uniform t values in [t_min, t_max]; couplings
/// without a bound state are skipped.
inline std::vector<CurvePoint> eigen_curve(double t_min, double t_max, int n, double a,
                                           const SpectralParams& p, unsigned threads = 1) {
  detail::check_delta(a, p);
  if (!(t_min < t_max) || n < 2) throw std::invalid_argument("eigen_curve: need t_min < t_max, n >= 2");
  std::vector<std::optional<EigenResult>> res(static_cast<std::size_t>(n));
  std::vector<double> ts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i)] = t_min + (t_max - t_min) * i / (n - 1);
  ts.back() = t_max;
  detail::parallel_for(ts.size(), threads, [&](std::size_t i) { res[i] = solve_eigenvalue(ts[i], a, p); });
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (res[i]) out.push_back({ts[i], res[i]->lambda});
  }
  return out;
}

enum class DeltaCertificate { Full, Alt };

/// Full: t^2 [1 + (q + 2ma)^2]; Alt: t^2 max(1, 1/cot + 2ma)^2.
inline double certificate_delta(double t, double a, const SpectralParams& p, DeltaCertificate which) {
  detail::check_delta(a, p);
  if (which == DeltaCertificate::Full) {
    const double b = p.q() + 2.0 * p.m() * a;
    return t * t * (1.0 + b * b);
  }
  const double b = std::max(1.0, 1.0 / p.cot_alpha() + 2.0 * p.m() * a);
  return t * t * b * b;
}

/**
 * At t = t0 sqrt(1 + eps) a bound state exists while the Alt certificate
 * only exceeds 1 by eps. Requires 1/cot + 2ma > 1 and 0 <= eps <= eps0.
 */
inline bool optimality_check(double eps, double a, const SpectralParams& p, double eps0 = 0.5) {
  detail::check_delta(a, p);
  if (!(1.0 / p.cot_alpha() + 2.0 * p.m() * a > 1.0)) {
    throw std::invalid_argument("optimality_check requires 1/cot(alpha) + 2ma > 1");
  }
  if (!(eps >= 0.0 && eps <= eps0)) {
    throw std::invalid_argument("optimality_check: epsilon must lie in [0, " + std::to_string(eps0) + "]");
  }
  const double t = t_zero(a, p) * std::sqrt(1.0 + eps);
  const auto ev = solve_eigenvalue(t, a, p);
  if (!ev) return false;
  return std::abs(certificate_delta(t, a, p, DeltaCertificate::Alt) - (1.0 + eps)) <= 1e-12;
}

/**
 * Builds the solution satisfying the boundary condition on (0, a) and the
 * decaying one on (a, inf), glued by continuity of psi_1, and returns
 * |[[it/2, -i],[1, 0]] psi(a+) + [[it/2, i],[-1, 0]] psi(a-)| / |psi(a-)|.
 */
inline double interface_residual(double lambda, double t, double a, const SpectralParams& p) {
  detail::check_delta(a, p);
  const double m = p.m(), cot = p.cot_alpha();
  if (!(lambda > -m && lambda < m)) {
    throw std::domain_error("interface_residual: lambda must lie in (-m, m)");
  }
  const double s = std::sqrt((m - lambda) * (m + lambda));
  // psi(a-) scaled by e^{-as}
  const double E = std::exp(-2.0 * a * s);
  const double ch = 0.5 * (1.0 + E);
  const double sh = -0.5 * std::expm1(-2.0 * a * s);
  const double sh_over_s = s > 0.0 ? sh / s : a;
  const double p1m = ch + cot * (m + lambda) * sh_over_s;
  const double p2m = (s * sh + cot * (m + lambda) * ch) / (m + lambda);
  const double p1p = p1m;
  const double p2p = -s / (m + lambda) * p1p;
  const cplx r1 = kI * (0.5 * t) * (p1p + p1m) - kI * p2p + kI * p2m;
  const cplx r2 = p1p - p1m;
  return std::sqrt(std::norm(r1) + std::norm(r2)) / std::hypot(p1m, p2m);
}

}  // namespace halfdirac
