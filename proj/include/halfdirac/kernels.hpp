#pragma once

/**
 * @file kernels.hpp
 * @brief Closed-form resolvent kernels.
 *
 * - whole_line_kernel:  Dirac resolvent kernel on the whole line
 * - halfline_kernel:    half-line kernel R(x,y) + R(x,-y) sigma_3 eta(alpha)
 * - halfline_kernel_product: the same object as psi phi^T / W (cross-check route)
 * - halfline_kernel_c:  speed-of-light dependent variant
 * - robin_kernels:      Schroedinger kernels G and G_alpha with Robin reflection
 *
 * Diagonal convention: at x == y the x >= y branch is used.
 */

#include <functional>
#include <stdexcept>
#include <vector>

#include "halfdirac/core.hpp"
#include "halfdirac/quadrature.hpp"

namespace halfdirac {

enum class Branch { XgeY, XltY };

inline const char* to_string(Branch b) { return b == Branch::XgeY ? "XgeY" : "XltY"; }

template <class T>
struct KernelEval {
  T value;
  Branch branch;
};

/// Speed of light c > 0 on top of base parameters; the boundary condition
/// becomes psi_1(0) cot(alpha)/(m c) = psi_2(0), so m > 0 is required.
struct CParams {
  double c;
  SpectralParams base;

  CParams(double speed, SpectralParams p) : c(speed), base(p) {
    if (!(speed > 0.0) || !std::isfinite(speed)) {
      throw std::invalid_argument("speed of light c must be finite and > 0");
    }
    if (!(p.m() > 0.0)) throw std::invalid_argument("c-dependent kernels require m > 0");
  }

  double rest_energy() const { return base.m() * c * c; }
  double boundary_coefficient() const { return base.cot_alpha() / (base.m() * c); }
};

namespace detail {

inline void check_halfline(double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::invalid_argument("half-line kernels need x, y >= 0");
  }
}

/// (pref)[[i zeta, s], [-s, i/zeta]] exp(i k r)
inline Mat2 dirac_block(cplx pref, cplx zeta, cplx k, double r, double s) {
  const cplx e = pref * std::exp(kI * k * r);
  return {kI * zeta * e, s * e, -s * e, kI / zeta * e};
}

/// (1 - i zeta b)/(1 + i zeta b) for boundary coefficient b.
inline cplx reflection(cplx zeta, double b) {
  const cplx den = 1.0 + kI * zeta * b;
  if (den == cplx(0.0, 0.0)) throw KernelPoleError("kernel pole: 1 + i zeta cot(alpha) = 0");
  return (1.0 - kI * zeta * b) / den;
}

/// Half-line matrix-form kernel from precomputed coefficients.
inline Mat2 halfline_from(double x, double y, cplx pref, cplx zeta, cplx k, cplx eta) {
  const double s = x >= y ? 1.0 : -1.0;
  const Mat2 direct = dirac_block(pref, zeta, k, std::abs(x - y), s);
  const Mat2 refl = dirac_block(pref, zeta, k, x + y, 1.0);
  // right-multiplication by sigma_3 eta flips the sign of the second column
  return {direct.a11 + eta * refl.a11, direct.a12 - eta * refl.a12,
          direct.a21 + eta * refl.a21, direct.a22 - eta * refl.a22};
}

}  // namespace detail

/// Whole-line Dirac kernel; sgn(0) := 0 on the diagonal.
inline Mat2 whole_line_kernel(double x, double y, cplx z, double m) {
  const cplx k = k_of(z, m);
  const cplx zeta = (z + m) / k;
  const double d = x - y;
  const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  return detail::dirac_block(0.5, zeta, k, std::abs(d), s);
}

/// Reflection coefficient eta(alpha) at z, so that A = sigma_3 eta.
inline cplx eta_alpha(cplx z, const SpectralParams& p) {
  return detail::reflection(zeta_of(z, p.m()), p.cot_alpha());
}

inline KernelEval<Mat2> halfline_kernel_eval(double x, double y, cplx z, const SpectralParams& p) {
  detail::check_halfline(x, y);
  const cplx k = k_of(z, p.m());
  const cplx zeta = (z + p.m()) / k;
  const cplx eta = detail::reflection(zeta, p.cot_alpha());
  return {detail::halfline_from(x, y, 0.5, zeta, k, eta), x >= y ? Branch::XgeY : Branch::XltY};
}

inline Mat2 halfline_kernel(double x, double y, cplx z, const SpectralParams& p) {
  return halfline_kernel_eval(x, y, z, p).value;
}

struct PsiPhiW {
  Vec2 psi;
  Vec2 phi;
  cplx W;
};

/// psi_alpha(x) = e^{ikx} (i zeta, -1), phi_alpha(x) as below, W = 1 + i zeta cot(alpha).
inline PsiPhiW psi_phi_W(double x, cplx z, const SpectralParams& p) {
  const cplx k = k_of(z, p.m());
  const cplx zeta = (z + p.m()) / k;
  const double cot = p.cot_alpha();
  const cplx e = std::exp(kI * k * x);
  const cplx cs = std::cos(k * x), sn = std::sin(k * x);
  return {{kI * zeta * e, -e}, {cs + zeta * cot * sn, -sn / zeta + cot * cs}, 1.0 + kI * zeta * cot};
}

/// Product form psi(x) phi(y)^T / W for x >= y and phi(x) psi(y)^T / W otherwise.
inline Mat2 halfline_kernel_product(double x, double y, cplx z, const SpectralParams& p) {
  detail::check_halfline(x, y);
  if (x >= y) {
    const PsiPhiW a = psi_phi_W(x, z, p), b = psi_phi_W(y, z, p);
    return (1.0 / a.W) * outer(a.psi, b.phi);
  }
  const PsiPhiW a = psi_phi_W(x, z, p), b = psi_phi_W(y, z, p);
  return (1.0 / a.W) * outer(a.phi, b.psi);
}

struct CCoefficients {
  cplx k_c;
  cplx zeta_c;
  cplx eta_c;
};

/**
 * k_c = sqrt(z^2 - (mc^2)^2)/c, zeta_c = (z + mc^2)/(c k_c) and
 * eta_c = (1 - i zeta_c b)/(1 + i zeta_c b) with b = cot(alpha)/(m c).
 * z is the absolute spectral parameter (not shifted by mc^2).
 */
inline CCoefficients c_coefficients(cplx z, const CParams& cp) {
  const double mc2 = cp.rest_energy();
  detail::check_not_edge(z, mc2);
  const cplx ck = detail::upper_sqrt((z - mc2) * (z + mc2), z.real());
  const cplx zeta = (z + mc2) / ck;
  return {ck / cp.c, zeta, detail::reflection(zeta, cp.boundary_coefficient())};
}

inline KernelEval<Mat2> halfline_kernel_c_eval(double x, double y, cplx z, const CParams& cp) {
  detail::check_halfline(x, y);
  const CCoefficients co = c_coefficients(z, cp);
  return {detail::halfline_from(x, y, 0.5 / cp.c, co.zeta_c, co.k_c, co.eta_c),
          x >= y ? Branch::XgeY : Branch::XltY};
}

inline Mat2 halfline_kernel_c(double x, double y, cplx z, const CParams& cp) {
  return halfline_kernel_c_eval(x, y, z, cp).value;
}

struct RobinKernels {
  cplx G;
  cplx G_alpha;
  cplx xi;
};

/// sqrt(2 m z) on the decaying branch (Im > 0); z must avoid [0, inf).
inline cplx robin_root(cplx z, double m) {
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw std::domain_error("Robin kernels need z outside [0, inf)");
  }
  cplx r = std::sqrt(2.0 * m * z);
  if (r.imag() < 0.0) r = -r;
  return r;
}

/// Robin reflection xi(alpha) = (s - 2i cot)/(s + 2i cot), s = sqrt(2 m z).
inline cplx robin_xi(cplx z, const SpectralParams& p) {
  if (!(p.m() > 0.0)) throw std::invalid_argument("Robin kernels require m > 0");
  const cplx s = robin_root(z, p.m());
  const cplx b = 2.0 * kI * p.cot_alpha();
  return (s - b) / (s + b);
}

/// G(x,y) = (i m / s) e^{i s |x-y|},  G_alpha = G(x,y) + G(x,-y) xi.
inline RobinKernels robin_kernels(double x, double y, cplx z, const SpectralParams& p) {
  detail::check_halfline(x, y);
  const cplx xi = robin_xi(z, p);
  const cplx s = robin_root(z, p.m());
  const cplx pref = kI * p.m() / s;
  const cplx g = pref * std::exp(kI * s * std::abs(x - y));
  const cplx g_refl = pref * std::exp(kI * s * (x + y));
  return {g, g + g_refl * xi, xi};
}

using Source = std::function<Vec2(double)>;

struct ResolventApplication {
  std::vector<Vec2> values;
  double quad_error_estimate = 0.0;  // max |g_n - g_2n| / max |g_n|
  bool coarse_grid = false;          // estimate above tolerance
};

namespace detail {

inline Vec2 apply_at(const Source& f, double x, cplx z, const SpectralParams& p,
                     const QuadGrid& grid) {
  // the kernel jumps at y = x; split the panel there
  Vec2 acc{0.0, 0.0};
  const cplx k = k_of(z, p.m());
  const cplx zeta = (z + p.m()) / k;
  const cplx eta = reflection(zeta, p.cot_alpha());
  grid.for_each_split(x, [&](double y, double w) {
    const Vec2 v = halfline_from(x, y, 0.5, zeta, k, eta) * f(y);
    acc[0] += w * v[0];
    acc[1] += w * v[1];
  });
  return acc;
}

}  // namespace detail

/**
 * g(x) = int_0^X R_alpha(x,y;z) f(y) dy at each of `points`, by composite
 * Gauss-Legendre over `grid` (panel containing x cut at x). The error
 * estimate compares against the bisected grid.
 */
inline ResolventApplication apply_resolvent(const Source& f, cplx z, const SpectralParams& p,
                                            const QuadGrid& grid, const std::vector<double>& points,
                                            double tolerance = 1e-10) {
  ResolventApplication out;
  out.values.reserve(points.size());
  const QuadGrid fine = grid.refined();
  double max_diff = 0.0, max_val = 0.0;
  for (double x : points) {
    if (x < grid.lower() || x > grid.upper()) {
      throw std::invalid_argument("apply_resolvent: evaluation point outside grid");
    }
    const Vec2 g = detail::apply_at(f, x, z, p, grid);
    const Vec2 g2 = detail::apply_at(f, x, z, p, fine);
    max_diff = std::max(max_diff, norm(Vec2{g[0] - g2[0], g[1] - g2[1]}));
    max_val = std::max(max_val, norm(g));
    out.values.push_back(g);
  }
  out.quad_error_estimate = max_val > 0.0 ? max_diff / max_val : max_diff;
  out.coarse_grid = out.quad_error_estimate > tolerance;
  return out;
}

}  // namespace halfdirac
