#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "halfdirac/bounds.hpp"
#include "halfdirac/kernels.hpp"
#include "test_support.hpp"

using namespace halfdirac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testing_support::rel;
using testing_support::uniform;

namespace {

const SpectralParams kMit(1.0, std::numbers::pi / 4);
const SpectralParams kMitMassless(0.0, std::numbers::pi / 4);

double max_entry_diff(const Mat2& a, const Mat2& b) {
  double d = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

double max_entry(const Mat2& a) {
  double d = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(a(i, j)));
  return d;
}

}  // namespace

TEST_CASE("whole-line kernel examples", "[kernels]") {
  const Mat2 d = whole_line_kernel(0, 0, {0, 1}, 0.0);
  CHECK(max_entry_diff(d, Mat2::diag(cplx(0, 0.5), cplx(0, 0.5))) < 1e-15);

  const double e = std::exp(-1.0) / 2;
  const Mat2 r = whole_line_kernel(1, 0, {0, 1}, 0.0);
  CHECK(max_entry_diff(r, Mat2{cplx(0, e), e, -e, cplx(0, e)}) < 1e-15);

  CHECK(max_entry(whole_line_kernel(60, 0, {0.3, 1}, 1.0)) < 1e-20);
  CHECK_THROWS_AS(whole_line_kernel(0, 1, 1.0, 1.0), SpectralEdgeError);
}

TEST_CASE("eta_alpha examples", "[kernels]") {
  CHECK(std::abs(eta_alpha({0, 1}, kMitMassless) - cplx(0, -1)) < 1e-15);
  // small cot: no reflection
  CHECK(std::abs(eta_alpha(3.0, SpectralParams::from_cot(1.0, 1e-9)) - 1.0) < 1e-8);
  for (int i = 0; i < 200; ++i) {
    const SpectralParams p(uniform(0, 3), uniform(0.05, 1.5));
    const double u = (uniform(0, 1) < 0.5 ? -1 : 1) * (p.m() + uniform(1e-3, 20));
    REQUIRE_THAT(std::abs(eta_alpha(u, p)), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("half-line kernel: hand-evaluated example", "[kernels]") {
  const Mat2 R = halfline_kernel(1, 0, {0, 1}, kMitMassless);
  CHECK_THAT(op_norm(R), WithinRel(std::sqrt(2.0) * std::exp(-1.0), 1e-14));
  CHECK_THAT(op_norm(R), WithinAbs(0.52026, 1e-5));
  // psi(1) phi(0)^T / W with W = 1 + i, psi(1) = e^{-1}(i,-1), phi(0) = (1,1)
  const Vec2 psi{cplx(0, std::exp(-1.0)), -std::exp(-1.0)};
  const Mat2 hand = (1.0 / cplx(1, 1)) * outer(psi, Vec2{1.0, 1.0});
  CHECK(max_entry_diff(R, hand) < 1e-15);
}

TEST_CASE("matrix form agrees with product form", "[kernels][property]") {
  for (int i = 0; i < 1000; ++i) {
    const SpectralParams p(uniform(0, 3), uniform(0.05, 1.5));
    const cplx z = testing_support::random_off_axis(10.0);
    const double x = uniform(0, 4), y = uniform(0, 4);
    const Mat2 a = halfline_kernel(x, y, z, p);
    const Mat2 b = halfline_kernel_product(x, y, z, p);
    REQUIRE(max_entry_diff(a, b) <= 1e-12 * std::max(1e-300, max_entry(b)));
  }
}

TEST_CASE("norm symmetry, branch tag and decay", "[kernels]") {
  for (int i = 0; i < 500; ++i) {
    const SpectralParams p(uniform(0, 3), uniform(0.05, 1.5));
    const cplx z = testing_support::random_off_axis(10.0);
    const double x = uniform(0, 5), y = uniform(0, 5);
    const auto a = halfline_kernel_eval(x, y, z, p);
    const auto b = halfline_kernel_eval(y, x, z, p);
    REQUIRE(rel(op_norm(a.value), op_norm(b.value)) <= 1e-12);
    REQUIRE((a.branch == Branch::XgeY) == (x >= y));
  }
  CHECK(halfline_kernel_eval(2, 2, {0, 1}, kMit).branch == Branch::XgeY);
  const cplx z(0.4, 0.5);
  double prev = op_norm(halfline_kernel(1.5, 1, z, kMit));
  for (double x : {5.0, 10.0, 20.0, 40.0}) {
    const double n = op_norm(halfline_kernel(x, 1, z, kMit));
    CHECK(n < prev);
    prev = n;
  }
  CHECK(prev < 1e-6);
  CHECK_THROWS_AS(halfline_kernel(-1, 0, {0, 1}, kMit), std::invalid_argument);
  CHECK_THROWS_AS(halfline_kernel(0, 0, -1.0, kMit), SpectralEdgeError);
}

TEST_CASE("kernel bounded by the uniform bound at sampled z", "[kernels][property]") {
  for (int i = 0; i < 2000; ++i) {
    const SpectralParams p(uniform(0, 3), uniform(0.05, 1.5));
    const cplx z = testing_support::random_off_axis(10.0);
    const double x = uniform(0, 4), y = uniform(0, 4);
    REQUIRE(op_norm(halfline_kernel(x, y, z, p)) <= sup_bound_full(x, y, p) * (1 + 1e-9));
  }
}

TEST_CASE("psi, phi and W", "[kernels]") {
  const SpectralParams p = SpectralParams::from_cot(1.3, 0.7);
  const cplx z(0.2, 0.9);
  const PsiPhiW at0 = psi_phi_W(0, z, p);
  const cplx zeta = zeta_of(z, p.m());
  CHECK(std::abs(at0.phi[0] - 1.0) < 1e-15);
  CHECK(std::abs(at0.phi[1] - 0.7) < 1e-15);
  CHECK(std::abs(at0.psi[0] - kI * zeta) < 1e-15);
  CHECK(std::abs(at0.psi[1] + 1.0) < 1e-15);
  CHECK(std::abs(at0.W - (1.0 + kI * zeta * 0.7)) < 1e-15);
  // phi satisfies the boundary condition; psi alone does not
  CHECK(std::abs(at0.phi[0] * p.cot_alpha() - at0.phi[1]) < 1e-15);
  const PsiPhiW m0 = psi_phi_W(0, {0, 1}, kMitMassless);
  CHECK(std::abs(m0.psi[0] * kMitMassless.cot_alpha() - m0.psi[1]) > 1.0);
}

TEST_CASE("c-dependent coefficients", "[kernels]") {
  const CParams cp(10.0, kMit);
  const CCoefficients co = c_coefficients(99.0, cp);
  CHECK(std::abs(co.k_c - cplx(0, std::sqrt(199.0) / 10)) < 1e-13);
  CHECK(std::abs(co.zeta_c - 199.0 / (10.0 * co.k_c)) < 1e-13);
  CHECK_THAT(co.eta_c.real(), WithinAbs(-0.17037, 5e-5));
  CHECK(std::abs(co.eta_c.imag()) < 1e-14);

  // c -> inf: zeta_c(mc^2 + z) cot/(mc) -> 2 cot / sqrt(2 m z)
  const cplx z(-1.0, 0.0);
  const cplx limit = 2.0 * kMit.cot_alpha() / robin_root(z, 1.0);
  double prev = 1e300;
  for (double c : {1e2, 1e3}) {
    const CParams cc(c, kMit);
    const cplx v = c_coefficients(c * c + z, cc).zeta_c * cc.boundary_coefficient();
    const double d = std::abs(v - limit);
    CHECK(d < prev);
    CHECK(d < 1e-3);
    prev = d;
  }

  // c = 1: same objects with cot replaced by cot/m
  const SpectralParams base = SpectralParams::from_cot(2.0, 0.6);
  const cplx w(0.3, 1.1);
  const CCoefficients c1 = c_coefficients(w, CParams(1.0, base));
  CHECK(std::abs(c1.k_c - k_of(w, 2.0)) < 1e-15);
  CHECK(std::abs(c1.zeta_c - zeta_of(w, 2.0)) < 1e-15);
  CHECK(std::abs(c1.eta_c - eta_alpha(w, SpectralParams::from_cot(2.0, 0.3))) < 1e-15);

  CHECK_THROWS_AS(CParams(0.0, kMit), std::invalid_argument);
  CHECK_THROWS_AS(CParams(1.0, kMitMassless), std::invalid_argument);
  CHECK_THROWS_AS(c_coefficients(100.0, cp), SpectralEdgeError);
}

TEST_CASE("c-dependent kernel at c = 1, m = 1 equals the half-line kernel", "[kernels][property]") {
  for (int i = 0; i < 500; ++i) {
    const SpectralParams p(1.0, uniform(0.05, 1.5));
    const cplx z = testing_support::random_off_axis(10.0);
    const double x = uniform(0, 4), y = uniform(0, 4);
    REQUIRE(max_entry_diff(halfline_kernel_c(x, y, z, CParams(1.0, p)), halfline_kernel(x, y, z, p)) == 0.0);
  }
}

TEST_CASE("c-dependent kernel tends to diag(G_alpha, 0)", "[kernels]") {
  const cplx z(-1.0, 0.0);
  const double x = 1.2, y = 0.5;
  const cplx ga = robin_kernels(x, y, z, kMit).G_alpha;
  double prev_off = 1e300, prev_11 = 1e300;
  for (double c : {10.0, 100.0, 1000.0}) {
    const Mat2 R = halfline_kernel_c(x, y, c * c + z, CParams(c, kMit));
    const double off = std::max({std::abs(R.a12), std::abs(R.a21), std::abs(R.a22)});
    const double d11 = std::abs(R.a11 - ga);
    CHECK(off < prev_off);
    CHECK(d11 < prev_11);
    prev_off = off;
    prev_11 = d11;
  }
  CHECK(prev_off < 1e-3);
  CHECK(prev_11 < 1e-3);
}

TEST_CASE("Robin kernels", "[kernels]") {
  const RobinKernels rk = robin_kernels(0.7, 0.7, -1.0, kMit);
  CHECK_THAT(rk.xi.real(), WithinAbs((std::sqrt(2.0) - 2) / (std::sqrt(2.0) + 2), 1e-15));
  CHECK_THAT(rk.xi.real(), WithinAbs(-0.171573, 1e-6));
  CHECK(std::abs(rk.G - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(robin_root({-3.0, 0.2}, 1.7).imag() > 0);
  CHECK(robin_root({2.0, -0.2}, 1.7).imag() > 0);
  // Dirichlet limit
  CHECK(std::abs(robin_xi(-1.0, SpectralParams::from_cot(1.0, 1e9)) + 1.0) < 1e-8);
  CHECK_THROWS_AS(robin_kernels(0, 0, 2.0, kMit), std::domain_error);
  CHECK_THROWS_AS(robin_kernels(0, 0, 0.0, kMit), std::domain_error);
  CHECK_THROWS_AS(robin_kernels(0, 0, -1.0, kMitMassless), std::invalid_argument);
}

TEST_CASE("Robin kernel satisfies h'(0) = 2 cot h(0)", "[kernels][property]") {
  for (int i = 0; i < 200; ++i) {
    const SpectralParams p(uniform(0.2, 3), uniform(0.1, 1.4));
    const cplx z(uniform(-5, -0.1), uniform(-2, 2));
    const double y0 = uniform(0.5, 3);
    auto h = [&](double x) { return robin_kernels(x, y0, z, p).G_alpha; };
    // one-sided second-order difference at 0
    const double d = 1e-5;
    const cplx dh = (-3.0 * h(0) + 4.0 * h(d) - h(2 * d)) / (2 * d);
    const cplx res = dh - 2.0 * p.cot_alpha() * h(0);
    REQUIRE(std::abs(res) <= 1e-8 * std::max(1.0, std::abs(dh)));
  }
}

TEST_CASE("apply_resolvent: zero source, boundary trace, coarse grid flag", "[kernels]") {
  const QuadGrid grid = make_grid(10.0, 50, 8);
  const std::vector<double> pts{0.0, 1.0, 2.5, 9.0};
  const Source zero = [](double) { return Vec2{0.0, 0.0}; };
  const auto r0 = apply_resolvent(zero, {0, 2}, kMit, grid, pts);
  for (const auto& v : r0.values) CHECK(norm(v) == 0.0);

  const Source gauss = [](double x) {
    const double g = std::exp(-(x - 3) * (x - 3));
    return Vec2{g, 0.5 * g};
  };
  CHECK(boundary_trace_residual(gauss, {0, 2}, kMit, grid) < 1e-8);
  const auto r = apply_resolvent(gauss, {0, 2}, kMit, grid, pts);
  CHECK(r.quad_error_estimate < 1e-10);
  CHECK_FALSE(r.coarse_grid);
  const auto coarse = apply_resolvent(gauss, {0, 2}, kMit, make_grid(10.0, 2, 3), pts);
  CHECK(coarse.coarse_grid);
  CHECK_THROWS_AS(apply_resolvent(gauss, {0, 2}, kMit, grid, {11.0}), std::invalid_argument);
}
