#pragma once

/**
 * @file nonrel.hpp
 * @brief Non-relativistic limit c -> inf of the half-line Dirac resolvent.
 *
 * The c-dependent kernel is evaluated at mc^2 + z and compared with the
 * Robin kernel diag(G_alpha(z), 0) with beta = 2 cot(alpha). All functions
 * need z outside [0, inf) and m > 0.
 */

#include <cmath>
#include <stdexcept>
#include <vector>

#include "halfdirac/certify.hpp"
#include "halfdirac/core.hpp"
#include "halfdirac/kernels.hpp"
#include "halfdirac/potentials.hpp"
#include "halfdirac/quadrature.hpp"

namespace halfdirac {

/// Robin parameter identified with the boundary angle.
inline double beta_of(const SpectralParams& p) { return 2.0 * p.cot_alpha(); }

namespace detail {

inline void check_nonrel(cplx z, const SpectralParams& p) {
  if (!(p.m() > 0.0)) throw std::invalid_argument("non-relativistic limit requires m > 0");
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw std::domain_error("z must lie outside [0, inf)");
  }
}

/// c_coefficients at mc^2 + z, using (w - mc^2)(w + mc^2) = z (z + 2mc^2) exactly.
inline CCoefficients shifted_coefficients(cplx z, const CParams& cp) {
  const double mc2 = cp.rest_energy();
  const cplx ck = upper_sqrt(z * (z + 2.0 * mc2), mc2 + z.real());
  const cplx zeta = (z + 2.0 * mc2) / ck;
  return {ck / cp.c, zeta, reflection(zeta, cp.boundary_coefficient())};
}

}  // namespace detail

/// |eta_c(mc^2 + z) - xi(alpha)(z)|.
inline double eta_gap(double c, cplx z, const SpectralParams& p) {
  detail::check_nonrel(z, p);
  const CCoefficients co = detail::shifted_coefficients(z, CParams(c, p));
  return std::abs(co.eta_c - robin_xi(z, p));
}

/// HS distance of the boundary-reflection parts, in closed form:
/// sqrt(m |eta_c - xi|^2 / (8 |z| (Im sqrt(2mz))^2)).
inline double boundary_hs_distance(double c, cplx z, const SpectralParams& p) {
  const double gap = eta_gap(c, z, p);
  const double im = robin_root(z, p.m()).imag();
  return std::sqrt(p.m() * gap * gap / (8.0 * std::abs(z) * im * im));
}

struct HsResult {
  double value = 0.0;
  double quad_error_estimate = 0.0;
  bool warning = false;  // > 1 % change under refinement
};

namespace detail {

enum class HsPart { Full, Boundary };

/// Squared Frobenius integrand, integrated over [0,X]^2; inner panels cut at y = x.
inline double hs_sq(double c, cplx z, const SpectralParams& p, const QuadGrid& grid, HsPart part) {
  const CParams cp(c, p);
  const CCoefficients co = shifted_coefficients(z, cp);
  const cplx xi = robin_xi(z, p);
  const cplx s = robin_root(z, p.m());
  const cplx gpref = kI * p.m() / s;
  const double pref = 0.5 / c;
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes[i];
    double inner = 0.0;
    grid.for_each_split(x, [&](double y, double w) {
      const cplx g_refl = gpref * std::exp(kI * s * (x + y)) * xi;
      Mat2 d;
      if (part == HsPart::Full) {
        d = halfline_from(x, y, pref, co.zeta_c, co.k_c, co.eta_c);
        d.a11 -= gpref * std::exp(kI * s * std::abs(x - y)) + g_refl;
      } else {
        d = halfline_from(x, y, pref, co.zeta_c, co.k_c, co.eta_c) -
            halfline_from(x, y, pref, co.zeta_c, co.k_c, 0.0);
        d.a11 -= g_refl;
      }
      inner += w * d.frobenius_sq();
    });
    total += grid.weights[i] * inner;
  }
  return total;
}

inline HsResult hs_with_refinement(double c, cplx z, const SpectralParams& p, const QuadGrid& grid,
                                   HsPart part) {
  check_nonrel(z, p);
  HsResult r;
  r.value = std::sqrt(hs_sq(c, z, p, grid, part));
  const double fine = std::sqrt(hs_sq(c, z, p, grid.refined(), part));
  r.quad_error_estimate = std::abs(r.value - fine);
  r.warning = r.quad_error_estimate > 0.01 * fine;
  return r;
}

}  // namespace detail

/**
 * sqrt of int int_{[0,X]^2} |R_alpha,c(x,y; mc^2+z) - diag(G_alpha(x,y;z), 0)|_F^2,
 * X = grid.upper(). The whole-line parts of the two kernels differ by a
 * convolution kernel of order 1/c, so the square grows linearly in X.
 */
inline HsResult full_hs_distance(double c, cplx z, const SpectralParams& p, const QuadGrid& grid) {
  return detail::hs_with_refinement(c, z, p, grid, detail::HsPart::Full);
}

/// Default grid: one panel per unit length, order 8.
inline HsResult full_hs_distance(double c, cplx z, const SpectralParams& p, double X) {
  const int panels = std::max(1, static_cast<int>(std::ceil(X)));
  return full_hs_distance(c, z, p, make_grid(X, panels, 8));
}

/// Same integral restricted to the reflection parts (terms in x + y only).
inline HsResult boundary_part_hs(double c, cplx z, const SpectralParams& p, const QuadGrid& grid) {
  return detail::hs_with_refinement(c, z, p, grid, detail::HsPart::Boundary);
}

struct ConvergenceRow {
  double c;
  double eta_gap;
  double boundary_hs;
  double full_hs;
  bool warning;
};

inline std::vector<ConvergenceRow> convergence_table(cplx z, const SpectralParams& p,
                                                     const std::vector<double>& c_list,
                                                     const QuadGrid& grid) {
  std::vector<ConvergenceRow> rows;
  rows.reserve(c_list.size());
  for (double c : c_list) {
    const HsResult f = full_hs_distance(c, z, p, grid);
    rows.push_back({c, eta_gap(c, z, p), boundary_hs_distance(c, z, p), f.value, f.warning});
  }
  return rows;
}

struct CertificateLimitRow {
  double c;
  double cert_c;
  double cert_nonrel;
  double rel_gap;  // |cert_c - cert_nonrel| / cert_nonrel (absolute gap if cert_nonrel = 0)
};

inline std::vector<CertificateLimitRow> certificate_limit_table(const PotentialSpec& V,
                                                                const SpectralParams& p,
                                                                const std::vector<double>& c_list,
                                                                const QuadGrid& grid,
                                                                unsigned threads = 1) {
  if (!(p.m() > 0.0)) throw std::invalid_argument("certificate limit requires m > 0");
  const double non = certificate_nonrel(V, p.m(), beta_of(p), grid, threads).value;
  std::vector<CertificateLimitRow> rows;
  rows.reserve(c_list.size());
  for (double c : c_list) {
    const double cc = certificate_c(V, p, c, grid, threads).value;
    const double gap = non > 0.0 ? std::abs(cc - non) / non : std::abs(cc - non);
    rows.push_back({c, cc, non, gap});
  }
  return rows;
}

}  // namespace halfdirac
