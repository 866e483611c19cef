#pragma once

/**
 * @file potentials.hpp
 * @brief Matrix potentials V: (0, inf) -> C^{2,2}, their pointwise operator
 *        norm |V(x)| and quadrature grids adapted to them.
 *
 * CSV schema (header mandatory):
 *   x,reV11,imV11,reV12,imV12,reV21,imV21,reV22,imV22
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "halfdirac/core.hpp"
#include "halfdirac/quadrature.hpp"

namespace halfdirac {

/// Tabulated potential, piecewise-linear in x, zero outside [front, back].
class SampledPotential {
 public:
  SampledPotential(std::vector<double> grid, std::vector<Mat2> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.empty() || grid_.size() != values_.size()) {
      throw std::invalid_argument("sampled potential: grid and values must be non-empty and match");
    }
    if (!(grid_.front() >= 0.0)) throw std::invalid_argument("sampled potential: x must be >= 0");
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
      if (!(grid_[i + 1] > grid_[i])) throw std::invalid_argument("grid not strictly increasing");
    }
    for (const auto& v : values_) {
      if (!v.all_finite()) throw std::invalid_argument("sampled potential: non-finite entry");
    }
  }

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<Mat2>& values() const noexcept { return values_; }

  Mat2 operator()(double x) const {
    if (x < grid_.front() || x > grid_.back()) return {};
    if (grid_.size() == 1) return values_.front();
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    if (it == grid_.end()) return values_.back();
    const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
    const double t = (x - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
    return (1.0 - t) * values_[j - 1] + cplx(t) * values_[j];
  }

 private:
  std::vector<double> grid_;
  std::vector<Mat2> values_;
};

/// t (2 pi sigma^2)^{-1/2} exp(-(x-a)^2 / 2 sigma^2) in entry (1,1).
struct GaussianBump11 {
  double t = 0.0;
  double a = 0.0;
  double sigma = 1.0;
};

/// amplitudes * exp(-rate x).
struct ExpDecay {
  Mat2 amplitudes{};
  double rate = 1.0;
};

class PotentialSpec {
 public:
  using Kind = std::variant<SampledPotential, GaussianBump11, ExpDecay>;

  explicit PotentialSpec(Kind kind, double support_hint = 0.0) : kind_(validated(std::move(kind))) {
    support_ = support_hint > 0.0 ? support_hint : default_support();
  }

  static PotentialSpec zero() { return PotentialSpec(ExpDecay{Mat2{}, 1.0}); }

  const Kind& kind() const noexcept { return kind_; }

  /// Truncation point X of the support.
  double support() const noexcept { return support_; }

  Mat2 value(double x) const {
    if (x < 0.0) return {};
    return std::visit(
        [x](const auto& k) -> Mat2 {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SampledPotential>) {
            return k(x);
          } else if constexpr (std::is_same_v<K, GaussianBump11>) {
            const double d = (x - k.a) / k.sigma;
            const double v = k.t / (std::sqrt(2.0 * std::numbers::pi) * k.sigma) *
                             std::exp(-0.5 * d * d);
            return Mat2::diag(v, 0.0);
          } else {
            return cplx(std::exp(-k.rate * x)) * k.amplitudes;
          }
        },
        kind_);
  }

  /// True iff V_12 = V_21 = V_22 = 0 identically.
  bool only_entry11() const {
    return std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          auto ok = [](const Mat2& m) {
            return m.a12 == cplx{} && m.a21 == cplx{} && m.a22 == cplx{};
          };
          if constexpr (std::is_same_v<K, SampledPotential>) {
            return std::all_of(k.values().begin(), k.values().end(), ok);
          } else if constexpr (std::is_same_v<K, GaussianBump11>) {
            return true;
          } else {
            return ok(k.amplitudes);
          }
        },
        kind_);
  }

  /// s V.
  PotentialSpec scaled(double s) const {
    return std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SampledPotential>) {
            std::vector<Mat2> v = k.values();
            for (auto& e : v) e = cplx(s) * e;
            return PotentialSpec(SampledPotential(k.grid(), std::move(v)), support_);
          } else if constexpr (std::is_same_v<K, GaussianBump11>) {
            return PotentialSpec(GaussianBump11{s * k.t, k.a, k.sigma}, support_);
          } else {
            return PotentialSpec(ExpDecay{cplx(s) * k.amplitudes, k.rate}, support_);
          }
        },
        kind_);
  }

  /// The bump is truncated at x = 0 without renormalisation; the lost mass
  /// is below 1e-12 only when a >= 8 sigma.
  bool truncation_warning() const {
    if (const auto* g = std::get_if<GaussianBump11>(&kind_)) return g->a < 8.0 * g->sigma;
    return false;
  }

 private:
  double default_support() const {
    return std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SampledPotential>) {
            return std::max(k.grid().back(), 1e-12);
          } else if constexpr (std::is_same_v<K, GaussianBump11>) {
            return k.a + 10.0 * k.sigma;
          } else {
            return 40.0 / k.rate;
          }
        },
        kind_);
  }

  static Kind validated(Kind kind) {
    std::visit(
        [](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GaussianBump11>) {
            if (!(v.sigma > 0.0) || !(v.a >= 0.0) || !std::isfinite(v.t)) {
              throw std::invalid_argument("gaussian bump needs sigma > 0, a >= 0, finite t");
            }
          } else if constexpr (std::is_same_v<T, ExpDecay>) {
            if (!(v.rate > 0.0)) throw std::invalid_argument("exponential potential needs rate > 0");
            if (!v.amplitudes.all_finite()) throw std::invalid_argument("non-finite amplitude");
          }
        },
        kind);
    return kind;
  }

  Kind kind_;
  double support_;
};

/// |V(x)|, the operator norm in C^2.
inline double pointwise_norm(const PotentialSpec& V, double x) {
  if (x < 0.0) return 0.0;
  return op_norm(V.value(x));
}

/// x -> |V(x)|, the scalar profile the certificates integrate.
using NormProfile = std::function<double(double)>;

inline NormProfile norm_profile(const PotentialSpec& V) {
  return [V](double x) { return pointwise_norm(V, x); };
}

/**
 * Grid on [0, X] adapted to V: for a gaussian bump `panels` uniform panels
 * cover [a - 10 sigma, a + 10 sigma] and one panel covers [0, a - 10 sigma];
 * for sampled data the panels follow the sample nodes when there are at most
 * `panels` of them; otherwise uniform panels.
 */
inline QuadGrid adapted_grid(const PotentialSpec& V, int panels = 32, int order = 8) {
  const double X = V.support();
  std::vector<double> b;
  if (const auto* g = std::get_if<GaussianBump11>(&V.kind())) {
    const double lo = std::max(0.0, g->a - 10.0 * g->sigma);
    const double hi = X;
    if (lo > 0.0) b.push_back(0.0);
    for (int i = 0; i <= panels; ++i) b.push_back(lo + (hi - lo) * i / panels);
    b.back() = hi;
  } else if (const auto* s = std::get_if<SampledPotential>(&V.kind());
             s && s->grid().size() >= 2 && static_cast<int>(s->grid().size()) - 1 <= panels) {
    if (s->grid().front() > 0.0) b.push_back(0.0);
    b.insert(b.end(), s->grid().begin(), s->grid().end());
    if (X > b.back()) b.push_back(X);
  } else {
    return make_grid(X, panels, order);
  }
  return make_grid_on(std::move(b), order);
}

struct WeightedL1 {
  double l1 = 0.0;           // int |V|
  double l1_weighted = 0.0;  // int |V| (1 + x)
  bool warning = false;      // refinement changed a value by > 1 %
};

inline WeightedL1 weighted_l1(const NormProfile& absV, const QuadGrid& grid) {
  auto integrate = [&](const QuadGrid& g) {
    WeightedL1 r;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = absV(g.nodes[i]);
      r.l1 += g.weights[i] * v;
      r.l1_weighted += g.weights[i] * v * (1.0 + g.nodes[i]);
    }
    return r;
  };
  WeightedL1 r = integrate(grid);
  const WeightedL1 fine = integrate(grid.refined());
  auto off = [](double a, double b) { return std::abs(a - b) > 0.01 * std::max(std::abs(b), 1e-300); };
  r.warning = off(r.l1, fine.l1) || off(r.l1_weighted, fine.l1_weighted);
  return r;
}

inline WeightedL1 weighted_l1(const PotentialSpec& V, const QuadGrid& grid) {
  WeightedL1 r = weighted_l1(norm_profile(V), grid);
  r.warning = r.warning || V.truncation_warning();
  return r;
}

namespace detail {

inline double parse_number(std::string_view field, std::size_t line, std::string_view column) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": malformed number in column '" +
                             std::string(column) + "'");
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error("line " + std::to_string(line) + ": non-finite value in column '" +
                             std::string(column) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 9> kPotentialColumns = {
    "x", "reV11", "imV11", "reV12", "imV12", "reV21", "imV21", "reV22", "imV22"};

/// Parses the potential CSV schema; errors carry the offending line number.
inline SampledPotential parse_potential_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw std::runtime_error("potential CSV is empty (header row required)");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM

  const auto header = detail::split_commas(line);
  std::array<int, 9> column_of{};
  column_of.fill(-1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string_view h = header[i];
    while (!h.empty() && h.front() == ' ') h.remove_prefix(1);
    while (!h.empty() && h.back() == ' ') h.remove_suffix(1);
    const auto it = std::find(kPotentialColumns.begin(), kPotentialColumns.end(), h);
    if (it == kPotentialColumns.end()) {
      throw std::runtime_error("line 1: unexpected column '" + std::string(h) + "'");
    }
    const auto idx = static_cast<std::size_t>(it - kPotentialColumns.begin());
    if (column_of[idx] != -1) throw std::runtime_error("line 1: duplicate column '" + std::string(h) + "'");
    column_of[idx] = static_cast<int>(i);
  }
  for (std::size_t c = 0; c < kPotentialColumns.size(); ++c) {
    if (column_of[c] == -1) {
      throw std::runtime_error("schema error: missing column '" + std::string(kPotentialColumns[c]) + "'");
    }
  }

  std::vector<double> xs;
  std::vector<Mat2> vs;
  while (next_line()) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    std::array<double, 9> v{};
    for (std::size_t c = 0; c < 9; ++c) {
      v[c] = detail::parse_number(fields[static_cast<std::size_t>(column_of[c])], lineno,
                                  kPotentialColumns[c]);
    }
    if (v[0] < 0.0) throw std::runtime_error("line " + std::to_string(lineno) + ": x must be >= 0");
    if (!xs.empty() && !(v[0] > xs.back())) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": grid not strictly increasing");
    }
    xs.push_back(v[0]);
    vs.push_back({{v[1], v[2]}, {v[3], v[4]}, {v[5], v[6]}, {v[7], v[8]}});
  }
  if (xs.empty()) throw std::runtime_error("potential CSV has no data rows");
  return SampledPotential(std::move(xs), std::move(vs));
}

inline SampledPotential load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open potential file '" + path + "'");
  return parse_potential_csv(in);
}

}  // namespace halfdirac
