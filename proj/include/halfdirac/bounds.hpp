#pragma once

/**
 * @file bounds.hpp
 * @brief Uniform bounds on the half-line resolvent kernel and the numerical
 *        harnesses that check them.
 *
 * sup over z of |R_alpha(x,y;z)|^2 equals 1 + (q + 2m min(x,y))^2; it is not
 * attained in the resolvent set but approached at z -> +-m. chi and chi11 are
 * the restrictions of |R_alpha|^2 and |R_alpha,11|^2 to the spectrum (x > y).
 *
 * The entry-(1,1) bound max(1, 1/cot + 2m min(x,y)) is only valid for
 * cot(alpha) <= 1; for larger cot(alpha) interior maxima on the spectrum
 * exceed it and scan_verify reports a violation.
 */

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "halfdirac/core.hpp"
#include "halfdirac/kernels.hpp"
#include "halfdirac/parallel.hpp"
#include "halfdirac/quadrature.hpp"

namespace halfdirac {

/// sqrt(1 + (q + 2m min(x,y))^2), the bound on |R_alpha(x,y;z)|.
inline double sup_bound_full(double x, double y, const SpectralParams& p) {
  const double b = p.q() + 2.0 * p.m() * std::min(x, y);
  return std::sqrt(1.0 + b * b);
}

/// max(1, 1/cot(alpha) + 2m min(x,y)), the bound on |R_alpha,11(x,y;z)|.
inline double sup_bound_11(double x, double y, const SpectralParams& p) {
  return std::max(1.0, 1.0 / p.cot_alpha() + 2.0 * p.m() * std::min(x, y));
}

namespace detail {

inline void check_on_spectrum(double u, double m) {
  if (!(std::abs(u) > m)) throw std::domain_error("chi: |u| must exceed m");
}

}  // namespace detail

/**
 * |R_alpha(x,y;u)|^2 for x > y and real |u| > m. The oscillating factors use
 * sqrt(u^2 - m^2) >= 0 on both spectral branches.
 */
inline double chi(double u, double y, const SpectralParams& p) {
  const double m = p.m();
  detail::check_on_spectrum(u, m);
  const double c2 = p.cot_alpha() * p.cot_alpha();
  const double gap = (u - m) * (u + m);
  const double kappa = std::sqrt(gap);
  const double den = u - m + c2 * (u + m);
  const double ratio = (u - m - c2 * (u + m)) / den;
  return 2.0 * u * u / gap + std::cos(2.0 * kappa * y) * ratio * 2.0 * m * u / gap +
         std::sin(2.0 * kappa * y) * 4.0 * m * u * p.cot_alpha() / (kappa * den);
}

/// |R_alpha,11(x,y;u)|^2 for x > y and real |u| > m.
inline double chi11(double u, double y, const SpectralParams& p) {
  const double m = p.m();
  detail::check_on_spectrum(u, m);
  const double c2 = p.cot_alpha() * p.cot_alpha();
  const double kappa = std::sqrt((u - m) * (u + m));
  const double den = u - m + c2 * (u + m);
  const double ratio = (u - m - c2 * (u + m)) / den;
  const double lift = (u + m) / (u - m);
  return 0.5 * lift + std::cos(2.0 * kappa * y) * 0.5 * ratio * lift +
         std::sin(2.0 * kappa * y) * p.cot_alpha() * (u + m) * (u + m) / (kappa * den);
}

struct EdgeLimits {
  double lim_inf;      // u -> +-inf
  double lim_minus_m;  // u -> -m
  double lim_plus_m;   // u -> +m
};

inline EdgeLimits edge_limits(double y, const SpectralParams& p) {
  const double my = 2.0 * p.m() * y;
  const double a = p.cot_alpha() + my, b = 1.0 / p.cot_alpha() + my;
  return {2.0, 1.0 + a * a, 1.0 + b * b};
}

/// Sample set for scan_verify: a rectangle plus one-sided spectrum probes.
struct ScanGrid {
  double re_max = 40.0;
  double im_max = 40.0;
  int n_re = 200;
  int n_im = 200;
  int n_spectrum = 256;        // per branch and side, geometric in |u| - m
  double spectrum_eps = 1e-6;  // probes at u +- i eps
  double edge_exclusion = 1e-3;
  double u_max = 0.0;  // 0: use re_max

  std::vector<cplx> points(double m) const {
    if (n_re < 1 || n_im < 1 || n_spectrum < 0 || !(re_max > 0.0) || !(im_max > 0.0)) {
      throw std::invalid_argument("ScanGrid: invalid sizes");
    }
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n_re) * n_im + 4 * static_cast<std::size_t>(n_spectrum));
    auto axis = [](double lim, int n, int i) {
      return n == 1 ? 0.0 : -lim + 2.0 * lim * i / (n - 1);
    };
    auto near_edge = [&](cplx z) {
      return std::abs(z - m) < edge_exclusion || std::abs(z + m) < edge_exclusion;
    };
    for (int i = 0; i < n_re; ++i) {
      for (int j = 0; j < n_im; ++j) {
        const cplx z(axis(re_max, n_re, i), axis(im_max, n_im, j));
        if (!near_edge(z)) out.push_back(z);
      }
    }
    const double top = (u_max > 0.0 ? u_max : re_max) - m;
    if (n_spectrum > 0 && top > edge_exclusion) {
      const double lo = std::log(edge_exclusion), hi = std::log(top);
      for (int j = 0; j < n_spectrum; ++j) {
        const double t = n_spectrum == 1 ? 0.0 : static_cast<double>(j) / (n_spectrum - 1);
        const double u = m + std::exp(lo + (hi - lo) * t);
        for (double sgn : {1.0, -1.0}) {
          out.emplace_back(sgn * u, spectrum_eps);
          out.emplace_back(sgn * u, -spectrum_eps);
        }
      }
    }
    return out;
  }
};

enum class ScanTarget { Full, Entry11 };

struct ScanReport {
  double bound = 0.0;
  double max_found = 0.0;
  cplx witness_z{};
  std::size_t n_samples = 0;
  double margin = 0.0;  // bound - max_found
  bool violation = false;
};

/**
 * Maximum of |R_alpha(x,y;z)| (or of its (1,1) entry) over the scan grid,
 * compared with the closed-form bound. Ties go to the smallest sample index.
 */
inline ScanReport scan_verify(double x, double y, const SpectralParams& p, const ScanGrid& grid,
                              ScanTarget which = ScanTarget::Full, double tol_scan = 1e-6,
                              unsigned threads = 1) {
  const std::vector<cplx> zs = grid.points(p.m());
  std::vector<double> vals(zs.size());
  detail::parallel_for(zs.size(), threads, [&](std::size_t i) {
    const Mat2 r = halfline_kernel(x, y, zs[i], p);
    vals[i] = which == ScanTarget::Full ? op_norm(r) : std::abs(r.a11);
  });
  ScanReport rep;
  rep.bound = which == ScanTarget::Full ? sup_bound_full(x, y, p) : sup_bound_11(x, y, p);
  rep.n_samples = zs.size();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (vals[i] > rep.max_found) {
      rep.max_found = vals[i];
      rep.witness_z = zs[i];
    }
  }
  rep.margin = rep.bound - rep.max_found;
  rep.violation = rep.max_found > rep.bound * (1.0 + tol_scan);
  return rep;
}

/**
 * Relative grid-L2 residual of (D_0 - z) g - f with g = R_alpha f, using
 * central differences of step h at the grid nodes lying in (lower+h, upper-h).
 * D_0 g = (m g_1 - g_2', g_1' - m g_2).
 */
inline double resolvent_identity_residual(const Source& f, cplx z, const SpectralParams& p,
                                          double h, const QuadGrid& grid) {
  if (!(h > 0.0)) throw std::invalid_argument("resolvent_identity_residual: h must be > 0");
  const double m = p.m();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes[i];
    if (x - h <= grid.lower() || x + h >= grid.upper()) continue;
    const Vec2 gm = detail::apply_at(f, x - h, z, p, grid);
    const Vec2 g0 = detail::apply_at(f, x, z, p, grid);
    const Vec2 gp = detail::apply_at(f, x + h, z, p, grid);
    const cplx d1 = (gp[0] - gm[0]) / (2.0 * h);
    const cplx d2 = (gp[1] - gm[1]) / (2.0 * h);
    const Vec2 fx = f(x);
    const cplx r1 = m * g0[0] - d2 - z * g0[0] - fx[0];
    const cplx r2 = d1 - m * g0[1] - z * g0[1] - fx[1];
    num += grid.weights[i] * (std::norm(r1) + std::norm(r2));
    den += grid.weights[i] * (std::norm(fx[0]) + std::norm(fx[1]));
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

/// |g_1(0) cot(alpha) - g_2(0)| for g = R_alpha f.
inline double boundary_trace_residual(const Source& f, cplx z, const SpectralParams& p,
                                      const QuadGrid& grid) {
  const Vec2 g = detail::apply_at(f, grid.lower(), z, p, grid);
  return std::abs(g[0] * p.cot_alpha() - g[1]);
}

}  // namespace halfdirac
