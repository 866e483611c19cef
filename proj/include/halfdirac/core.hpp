#pragma once

/**
 * @file core.hpp
 * @brief Parameters, 2x2 complex matrices and the spectral coefficients
 *        k(z), zeta(z) of the free half-line Dirac operator.
 *
 * Every other header consumes these. All functions are pure.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace halfdirac {

using cplx = std::complex<double>;
using Vec2 = std::array<cplx, 2>;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when a kernel is evaluated at z = +-m, where it is singular.
class SpectralEdgeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a closed-form coefficient hits a pole.
class KernelPoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * Mass m >= 0 and boundary angle alpha in (0, pi/2) of the condition
 * psi_1(0) cot(alpha) = psi_2(0). cot(alpha) and q = max(cot, 1/cot) are
 * cached at construction.
 */
class SpectralParams {
 public:
  SpectralParams(double mass, double alpha) : m_(mass), alpha_(alpha) {
    check_mass(mass);
    if (!(alpha > 0.0 && alpha < std::numbers::pi / 2.0)) {
      throw std::invalid_argument("alpha must lie strictly inside (0, pi/2), got " +
                                  std::to_string(alpha));
    }
    cot_ = std::cos(alpha) / std::sin(alpha);
    q_ = std::max(cot_, 1.0 / cot_);
  }

  /// Builds the parameters from cot(alpha) directly; cot is stored exactly.
  static SpectralParams from_cot(double mass, double cot_alpha) {
    if (!(cot_alpha > 0.0) || !std::isfinite(cot_alpha)) {
      throw std::invalid_argument("cot(alpha) must be finite and > 0, got " +
                                  std::to_string(cot_alpha));
    }
    SpectralParams p(mass, std::atan2(1.0, cot_alpha));
    p.cot_ = cot_alpha;
    p.q_ = std::max(cot_alpha, 1.0 / cot_alpha);
    return p;
  }

  double m() const noexcept { return m_; }
  double alpha() const noexcept { return alpha_; }
  double cot_alpha() const noexcept { return cot_; }
  double q() const noexcept { return q_; }

 private:
  static void check_mass(double mass) {
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
      throw std::invalid_argument("mass must be finite and >= 0, got " + std::to_string(mass));
    }
  }

  double m_;
  double alpha_;
  double cot_ = 1.0;
  double q_ = 1.0;
};

inline double q_of(const SpectralParams& p) noexcept { return p.q(); }

/// 2x2 complex matrix, row-major.
struct Mat2 {
  cplx a11{}, a12{}, a21{}, a22{};

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

  cplx operator()(int i, int j) const {
    if (i == 0) return j == 0 ? a11 : a12;
    return j == 0 ? a21 : a22;
  }

  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  cplx det() const { return a11 * a22 - a12 * a21; }
  double frobenius_sq() const {
    return std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22);
  }
  bool all_finite() const {
    auto ok = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    return ok(a11) && ok(a12) && ok(a21) && ok(a22);
  }

  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Mat2 operator*(cplx s, const Mat2& a) {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a.a11 * v[0] + a.a12 * v[1], a.a21 * v[0] + a.a22 * v[1]};
  }
};

/// Outer product u v^T (no conjugation).
inline Mat2 outer(const Vec2& u, const Vec2& v) {
  return {u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]};
}

inline double norm(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

/**
 * Largest singular value from the closed form
 *   s_max^2 = (F + sqrt((F - 2|det|)(F + 2|det|))) / 2,  F = ||M||_F^2,
 * exact for rank-one and diagonal input.
 */
inline double op_norm(const Mat2& M) {
  if (!M.all_finite()) throw std::domain_error("op_norm: non-finite matrix entry");
  const double f = M.frobenius_sq();
  const double d = std::abs(M.det());
  const double disc = std::max(0.0, (f - 2.0 * d) * (f + 2.0 * d));
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

enum class RegionTag { ResolventSet, SpectrumPositive, SpectrumNegative, Edge };

inline const char* to_string(RegionTag t) {
  switch (t) {
    case RegionTag::ResolventSet: return "ResolventSet";
    case RegionTag::SpectrumPositive: return "SpectrumPositive";
    case RegionTag::SpectrumNegative: return "SpectrumNegative";
    case RegionTag::Edge: return "Edge";
  }
  return "?";
}

/// Location of z relative to sigma(D_0) = (-inf, -m] u [m, inf).
inline RegionTag classify(cplx z, double m, double imag_tol = 0.0) {
  if (std::abs(z.imag()) > imag_tol) return RegionTag::ResolventSet;
  const double u = z.real();
  if (u == m || u == -m) return RegionTag::Edge;
  if (u > m) return RegionTag::SpectrumPositive;
  if (u < -m) return RegionTag::SpectrumNegative;
  return RegionTag::ResolventSet;
}

namespace detail {

/// sqrt(w) on the branch Im > 0. When w is real and >= 0 the root is real and
/// its sign follows `real_sign` (the upper half-plane limit of sqrt(z^2 - M^2)).
inline cplx upper_sqrt(cplx w, double real_sign) {
  cplx r = std::sqrt(w);
  if (r.imag() < 0.0) r = -r;
  if (r.imag() == 0.0) r = cplx(std::copysign(std::abs(r.real()), real_sign), 0.0);
  return r;
}

inline void check_not_edge(cplx z, double edge) {
  if (z.imag() == 0.0 && (z.real() == edge || z.real() == -edge)) {
    throw SpectralEdgeError("kernel singular at spectral edge");
  }
}

}  // namespace detail

/**
 * k(z) = sqrt(z^2 - m^2) with Im k > 0. On the spectrum the value is the
 * limit from the upper half-plane, so k(u) > 0 for u > m and k(u) < 0 for
 * u < -m.
 */
inline cplx k_of(cplx z, double m) {
  detail::check_not_edge(z, m);
  return detail::upper_sqrt((z - m) * (z + m), z.real());
}

/// zeta(z) = (z + m) / k(z).
inline cplx zeta_of(cplx z, double m) { return (z + m) / k_of(z, m); }

}  // namespace halfdirac
