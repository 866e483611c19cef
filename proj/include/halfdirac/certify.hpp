#pragma once

/**
 * @file certify.hpp
 * @brief Hilbert-Schmidt stability certificates and Nystrom norms of the
 *        Birman-Schwinger kernels.
 *
 * Every certificate is a double integral
 *
 *     value = int int |V(x)| w(min(x,y)) |V(y)| dx dy
 *
 * for a condition-specific weight w; the verdict is value < 1. The integral
 * is evaluated by tensor Gauss-Legendre quadrature on the given grid and on
 * its bisection, whose difference is the reported error estimate.
 */

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfdirac/core.hpp"
#include "halfdirac/parallel.hpp"
#include "halfdirac/potentials.hpp"
#include "halfdirac/quadrature.hpp"

namespace halfdirac {

enum class ConditionId { Sufcon, SufconAlt, SufconNon, SufconC };

inline const char* to_string(ConditionId id) {
  switch (id) {
    case ConditionId::Sufcon: return "sufcon";
    case ConditionId::SufconAlt: return "sufcon_alt";
    case ConditionId::SufconNon: return "sufcon_non";
    case ConditionId::SufconC: return "sufcon_c";
  }
  return "?";
}

struct Certificate {
  ConditionId condition_id = ConditionId::Sufcon;
  double c = 0.0;     // SufconC only
  double beta = 0.0;  // SufconNon only
  double value = 0.0;
  bool verdict = true;   // value < 1
  bool marginal = false; // |value - 1| < quad_error_estimate
  double quad_error_estimate = 0.0;
  bool warning = false;  // truncated bump or > 1 % change under refinement
  // For SufconNon the Robin parameter is stored through cot(alpha) = beta / 2.
  SpectralParams params = SpectralParams::from_cot(0.0, 1.0);
};

/// L(x,y) = |V(x)|^{1/2} sqrt(1 + (q + 2m min(x,y))^2) |V(y)|^{1/2}.
inline double kernel_L(double x, double y, const PotentialSpec& V, const SpectralParams& p) {
  const double b = p.q() + 2.0 * p.m() * std::min(x, y);
  return std::sqrt(pointwise_norm(V, x)) * std::sqrt(1.0 + b * b) * std::sqrt(pointwise_norm(V, y));
}

struct SplitKernels {
  double L1;
  double L2;
  double Linf;
};

inline SplitKernels kernels_L1_L2_Linf(double x, double y, const PotentialSpec& V,
                                       const SpectralParams& p, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const double s = std::sqrt(pointwise_norm(V, x)) * std::sqrt(pointwise_norm(V, y));
  const double mn = 2.0 * p.m() * std::min(x, y);
  return {s, s * (p.q() + mn), s * (2.0 * p.m() / beta + mn)};
}

namespace detail {

using MinWeight = std::function<double(double)>;

/// sum_i sum_j w_i w_j f_i f_j weight(min(x_i, x_j)), rows reduced in order.
inline double min_weighted_integral(const NormProfile& absV, const QuadGrid& grid,
                                    const MinWeight& weight, unsigned threads) {
  const std::size_t n = grid.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = grid.weights[i] * absV(grid.nodes[i]);
  std::vector<double> rows(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    if (f[i] == 0.0) return;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (f[j] == 0.0) continue;
      acc += f[j] * weight(std::min(grid.nodes[i], grid.nodes[j]));
    }
    rows[i] = f[i] * acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

inline Certificate finish(Certificate cert, const NormProfile& absV, const QuadGrid& grid,
                          const MinWeight& weight, unsigned threads, bool warn) {
  cert.value = min_weighted_integral(absV, grid, weight, threads);
  const double fine = min_weighted_integral(absV, grid.refined(), weight, threads);
  cert.quad_error_estimate = std::abs(cert.value - fine);
  cert.verdict = cert.value < 1.0;
  cert.marginal = std::abs(cert.value - 1.0) < cert.quad_error_estimate;
  cert.warning = warn || cert.quad_error_estimate > 0.01 * std::abs(fine);
  return cert;
}

}  // namespace detail

/// int int |V(x)| [1 + (q + 2m min(x,y))^2] |V(y)| dx dy.
inline Certificate certificate_sufcon(const PotentialSpec& V, const SpectralParams& p,
                                      const QuadGrid& grid, unsigned threads = 1) {
  Certificate cert;
  cert.condition_id = ConditionId::Sufcon;
  cert.params = p;
  const double q = p.q(), m2 = 2.0 * p.m();
  return detail::finish(cert, norm_profile(V), grid,
                        [=](double mn) { const double b = q + m2 * mn; return 1.0 + b * b; },
                        threads, V.truncation_warning());
}

/// int int |V(x)| max(1, 1/cot(alpha) + 2m min(x,y))^2 |V(y)| dx dy; V must be (1,1)-only.
inline Certificate certificate_alt(const PotentialSpec& V, const SpectralParams& p,
                                   const QuadGrid& grid, unsigned threads = 1) {
  if (!V.only_entry11()) {
    throw std::invalid_argument("alt certificate requires V12 = V21 = V22 = 0");
  }
  Certificate cert;
  cert.condition_id = ConditionId::SufconAlt;
  cert.params = p;
  const double inv = 1.0 / p.cot_alpha(), m2 = 2.0 * p.m();
  return detail::finish(cert, norm_profile(V), grid,
                        [=](double mn) { const double b = std::max(1.0, inv + m2 * mn); return b * b; },
                        threads, V.truncation_warning());
}

/// int int |V(x)| (2m/beta + 2m min(x,y))^2 |V(y)| dx dy for a scalar profile |V|.
inline Certificate certificate_nonrel(const NormProfile& absV, double m, double beta,
                                      const QuadGrid& grid, unsigned threads = 1,
                                      bool warn = false) {
  if (!(m > 0.0)) throw std::invalid_argument("nonrelativistic certificate requires m > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  Certificate cert;
  cert.condition_id = ConditionId::SufconNon;
  cert.beta = beta;
  cert.params = SpectralParams::from_cot(m, 0.5 * beta);
  const double b0 = 2.0 * m / beta, m2 = 2.0 * m;
  return detail::finish(cert, absV, grid,
                        [=](double mn) { const double b = b0 + m2 * mn; return b * b; },
                        threads, warn);
}

inline Certificate certificate_nonrel(const PotentialSpec& V, double m, double beta,
                                      const QuadGrid& grid, unsigned threads = 1) {
  return certificate_nonrel(norm_profile(V), m, beta, grid, threads, V.truncation_warning());
}

/// (1/c^2) int int |V(x)| [1 + (q_c + 2mc min(x,y))^2] |V(y)| dx dy,
/// q_c = max(cot(alpha)/(mc), mc/cot(alpha)).
inline Certificate certificate_c(const PotentialSpec& V, const SpectralParams& p, double c,
                                 const QuadGrid& grid, unsigned threads = 1) {
  if (!(p.m() > 0.0)) throw std::invalid_argument("c-dependent certificate requires m > 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("speed of light c must be > 0");
  Certificate cert;
  cert.condition_id = ConditionId::SufconC;
  cert.c = c;
  cert.params = p;
  const double mc = p.m() * c;
  const double qc = std::max(p.cot_alpha() / mc, mc / p.cot_alpha());
  // (1/c^2)[1 + (q_c + 2mc s)^2] = 1/c^2 + (q_c/c + 2m s)^2
  const double inv_c2 = 1.0 / (c * c), b0 = qc / c, m2 = 2.0 * p.m();
  return detail::finish(cert, norm_profile(V), grid,
                        [=](double mn) { const double b = b0 + m2 * mn; return inv_c2 + b * b; },
                        threads, V.truncation_warning());
}

/// (int |V|)^2 + (int |V(x)| (q + 2mx)^2 dx)^2, an upper bound for the sufcon
/// value because min(x,y) <= sqrt(xy) and q >= 1.
inline double separable_upper_bound(const PotentialSpec& V, const SpectralParams& p,
                                    const QuadGrid& grid) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes[i];
    const double v = pointwise_norm(V, x);
    const double g = p.q() + 2.0 * p.m() * x;
    a += grid.weights[i] * v;
    b += grid.weights[i] * v * g * g;
  }
  return a * a + b * b;
}

using ScalarKernel = std::function<double(double, double)>;

/// Symmetrised Nystrom matrix M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j).
class NystromOperator {
 public:
  NystromOperator(const ScalarKernel& K, const QuadGrid& grid, unsigned threads = 1)
      : nodes_(grid.nodes), weights_(grid.weights), n_(grid.size()), M_(n_ * n_) {
    std::vector<double> sw(n_);
    for (std::size_t i = 0; i < n_; ++i) sw[i] = std::sqrt(weights_[i]);
    detail::parallel_for(n_, threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < n_; ++j) M_[i * n_ + j] = sw[i] * K(nodes_[i], nodes_[j]) * sw[j];
    });
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return M_[i * n_ + j]; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// sum M_ij^2, the tensor-quadrature HS norm squared of K.
  double frobenius_sq() const {
    double s = 0.0;
    for (double v : M_) s += v * v;
    return s;
  }

  /// Largest eigenvalue by power iteration from the all-ones vector. Stops
  /// on the eigen-residual |Mv - rq v|, so a spectrum symmetric about zero
  /// is reported as non-convergence instead of a wrong Rayleigh quotient.
  double largest_eigenvalue(double tol = 1e-12, int max_iter = 10000) const {
    if (n_ == 0) return 0.0;
    const double thr = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n_));
    std::vector<double> v(n_, 1.0 / std::sqrt(static_cast<double>(n_))), w(n_);
    double rq = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      double wn = 0.0;
      rq = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        const double* row = &M_[i * n_];
        for (std::size_t j = 0; j < n_; ++j) acc += row[j] * v[j];
        w[i] = acc;
        wn += acc * acc;
        rq += acc * v[i];
      }
      if (wn == 0.0) return 0.0;
      double res = 0.0;
      for (std::size_t i = 0; i < n_; ++i) res += (w[i] - rq * v[i]) * (w[i] - rq * v[i]);
      if (std::sqrt(res) <= thr * std::abs(rq)) return rq;
      wn = std::sqrt(wn);
      for (std::size_t i = 0; i < n_; ++i) v[i] = w[i] / wn;
    }
    throw std::runtime_error("nystrom_norm: power iteration did not converge in " +
                             std::to_string(max_iter) + " iterations (last estimate " +
                             std::to_string(rq) + ")");
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::size_t n_;
  std::vector<double> M_;
};

/// Operator norm of a symmetric non-negative integral kernel on the grid.
inline double nystrom_norm(const ScalarKernel& K, const QuadGrid& grid, unsigned threads = 1) {
  return NystromOperator(K, grid, threads).largest_eigenvalue();
}

/// The kernel L and its parts L1, L2 as scalar kernels with |V| cached at the nodes.
struct BirmanSchwingerKernels {
  ScalarKernel L;
  ScalarKernel L1;
  ScalarKernel L2;
};

inline BirmanSchwingerKernels birman_schwinger_kernels(const PotentialSpec& V, const SpectralParams& p) {
  const double q = p.q(), m2 = 2.0 * p.m();
  auto sq = [V](double x) { return std::sqrt(pointwise_norm(V, x)); };
  return {
      [=](double x, double y) {
        const double b = q + m2 * std::min(x, y);
        return sq(x) * std::sqrt(1.0 + b * b) * sq(y);
      },
      [=](double x, double y) { return sq(x) * sq(y); },
      [=](double x, double y) { return sq(x) * (q + m2 * std::min(x, y)) * sq(y); },
  };
}

/// HS norm squared of L from the Nystrom matrix; the second route to the sufcon value.
inline double hs_norm_sq_L(const PotentialSpec& V, const SpectralParams& p, const QuadGrid& grid,
                           unsigned threads = 1) {
  return NystromOperator([&](double x, double y) { return kernel_L(x, y, V, p); }, grid, threads)
      .frobenius_sq();
}

/// ||L1|| <= 1 - a_split and ||L2|| <= a_split.
inline bool split_check(const PotentialSpec& V, const SpectralParams& p, const QuadGrid& grid,
                        double a_split, unsigned threads = 1) {
  if (!(a_split > 0.0 && a_split < 1.0)) throw std::invalid_argument("a_split must lie in (0, 1)");
  const BirmanSchwingerKernels k = birman_schwinger_kernels(V, p);
  if (nystrom_norm(k.L1, grid, threads) > 1.0 - a_split) return false;
  return nystrom_norm(k.L2, grid, threads) <= a_split;
}

}  // namespace halfdirac
