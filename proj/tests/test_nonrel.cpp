#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "halfdirac/nonrel.hpp"
#include "test_support.hpp"

using namespace halfdirac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpectralParams kMit(1.0, std::numbers::pi / 4);
const cplx kZ(-1.0, 0.0);

// int int_{[0,X]^2} |G(x,-y)|^2 |gap|^2 by tensor Gauss-Legendre
double boundary_hs_quadrature(double c, cplx z, const SpectralParams& p, double X) {
  const QuadGrid g = make_grid(X, 60, 12);
  const cplx s = robin_root(z, p.m());
  const double gap = eta_gap(c, z, p);
  double acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const cplx G = kI * p.m() / s * std::exp(kI * s * (g.nodes[i] + g.nodes[j]));
      acc += g.weights[i] * g.weights[j] * std::norm(G) * gap * gap;
    }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("beta identification", "[nonrel]") {
  CHECK_THAT(beta_of(kMit), WithinRel(2.0, 1e-15));
  CHECK(beta_of(SpectralParams::from_cot(1.0, 3.0)) == 6.0);
  CHECK(beta_of(SpectralParams(1.0, 1.5)) > 0);
}

TEST_CASE("eta gap decays like 1/c^2", "[nonrel]") {
  const double g10 = eta_gap(10, kZ, kMit);
  CHECK(g10 > 1.2e-3 / 2);
  CHECK(g10 < 1.2e-3 * 2);
  const CCoefficients co = c_coefficients(99.0, CParams(10, kMit));
  CHECK_THAT(co.eta_c.real(), WithinAbs(-0.1703563677, 1e-9));
  CHECK_THAT(std::abs(co.eta_c - robin_xi(kZ, kMit)), WithinRel(g10, 1e-10));
  const double g100 = eta_gap(100, kZ, kMit), g1000 = eta_gap(1000, kZ, kMit);
  CHECK(g100 * 20 <= g10);
  CHECK(g100 / g10 <= 0.05);
  CHECK(g1000 / g100 <= 0.05);
  CHECK(g1000 < g100);
  CHECK_THROWS_AS(eta_gap(10, 0.5, kMit), std::domain_error);
  CHECK_THROWS_AS(eta_gap(10, 0.0, kMit), std::domain_error);
  CHECK_THROWS_AS(eta_gap(10, kZ, SpectralParams(0.0, 0.5)), std::invalid_argument);
  CHECK_NOTHROW(eta_gap(10, {2.0, 0.5}, kMit));
}

TEST_CASE("boundary HS distance matches 2D quadrature", "[nonrel]") {
  for (cplx z : {kZ, cplx(-0.5, 0.8), cplx(2.0, 1.0)}) {
    for (double c : {10.0, 100.0}) {
      const double closed = boundary_hs_distance(c, z, kMit);
      const double X = 40.0 / robin_root(z, 1.0).imag();
      CHECK_THAT(closed, WithinRel(boundary_hs_quadrature(c, z, kMit, X), 1e-6));
    }
  }
  CHECK_THAT(boundary_hs_distance(10, kZ, kMit) / eta_gap(10, kZ, kMit),
             WithinRel(boundary_hs_distance(1000, kZ, kMit) / eta_gap(1000, kZ, kMit), 1e-12));
}

TEST_CASE("full HS distance decreases with c", "[nonrel]") {
  const QuadGrid g = make_grid(20.0, 20, 8);
  double prev = 1e300;
  std::vector<double> vals;
  for (double c : {10.0, 50.0, 250.0}) {
    const HsResult r = full_hs_distance(c, kZ, kMit, g);
    CHECK(r.value < prev);
    CHECK_FALSE(r.warning);
    prev = r.value;
    vals.push_back(r.value);
  }
  CHECK(vals[2] <= 0.1 * vals[0]);
  const HsResult other = full_hs_distance(50.0, {-0.5, 0.8}, kMit, 20.0);
  CHECK(other.value < full_hs_distance(10.0, {-0.5, 0.8}, kMit, 20.0).value);
}

TEST_CASE("truncation dependence of the HS distance", "[nonrel]") {
  // the reflection part is localised at the boundary
  const double b20 = boundary_part_hs(50.0, kZ, kMit, make_grid(20.0, 20, 8)).value;
  const double b30 = boundary_part_hs(50.0, kZ, kMit, make_grid(30.0, 30, 8)).value;
  CHECK(std::abs(b30 - b20) < 0.01 * b20);
  // the whole-line parts differ by a convolution kernel, so HS^2 grows linearly in X
  const double f20 = full_hs_distance(50.0, kZ, kMit, 20.0).value;
  const double f30 = full_hs_distance(50.0, kZ, kMit, 30.0).value;
  const double f40 = full_hs_distance(50.0, kZ, kMit, 40.0).value;
  const double d1 = f30 * f30 - f20 * f20, d2 = f40 * f40 - f30 * f30;
  CHECK(d1 > 0);
  CHECK_THAT(d2, WithinRel(d1, 0.02));
}

TEST_CASE("coarse grid flags the HS distance", "[nonrel]") {
  CHECK(full_hs_distance(10.0, kZ, kMit, make_grid(20.0, 1, 2)).warning);
}

TEST_CASE("convergence table", "[nonrel]") {
  const auto rows = convergence_table(kZ, kMit, {10, 100, 1000}, make_grid(20.0, 20, 8));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].eta_gap >= 0);
    CHECK(std::isfinite(rows[i].full_hs));
    if (i) {
      CHECK(rows[i].eta_gap < rows[i - 1].eta_gap);
      CHECK(rows[i].boundary_hs < rows[i - 1].boundary_hs);
      CHECK(rows[i].full_hs < rows[i - 1].full_hs);
    }
  }
}

TEST_CASE("certificate limit table", "[nonrel]") {
  const PotentialSpec g(GaussianBump11{-0.2, 2.0, 1e-3});
  const auto rows = certificate_limit_table(g, kMit, {10, 100, 1000}, adapted_grid(g));
  REQUIRE(rows.size() == 3);
  CHECK_THAT(rows[0].cert_nonrel, WithinRel(1.0, 0.02));
  CHECK(rows[2].rel_gap <= 0.01);
  CHECK(rows[1].rel_gap < rows[0].rel_gap);
  CHECK(rows[2].rel_gap < rows[1].rel_gap);
  const auto zero = certificate_limit_table(PotentialSpec::zero(), kMit, {10, 100}, make_grid(3, 3, 4));
  for (const auto& r : zero) {
    CHECK(r.cert_c == 0);
    CHECK(r.cert_nonrel == 0);
    CHECK(r.rel_gap == 0);
  }
}
