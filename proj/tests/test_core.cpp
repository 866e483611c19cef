#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "halfdirac/core.hpp"
#include "test_support.hpp"

using namespace halfdirac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testing_support::uniform;

namespace {

// max |M v| over a grid of unit vectors v = (cos t, e^{i p} sin t)
double grid_norm(const Mat2& M, int n = 800) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = std::numbers::pi / 2 * i / n;
    for (int j = 0; j < n; ++j) {
      const double ph = 2 * std::numbers::pi * j / n;
      const Vec2 v{std::cos(t), std::polar(std::sin(t), ph)};
      best = std::max(best, norm(M * v));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("SpectralParams validation and derived values", "[core]") {
  CHECK_THROWS_AS(SpectralParams(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(1.0, std::numbers::pi / 2), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(1.0, -0.3), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams(std::numeric_limits<double>::quiet_NaN(), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SpectralParams::from_cot(1.0, 0.0), std::invalid_argument);

  const SpectralParams p(2.0, 0.3);
  CHECK_THAT(p.cot_alpha(), WithinRel(std::cos(0.3) / std::sin(0.3), 1e-15));
  CHECK(p.m() == 2.0);
  CHECK(p.q() >= 1.0);
}

TEST_CASE("q_of examples", "[core]") {
  CHECK_THAT(q_of(SpectralParams(1.0, std::numbers::pi / 4)), WithinAbs(1.0, 1e-15));
  CHECK(q_of(SpectralParams::from_cot(1.0, 2.0)) == 2.0);
  CHECK(q_of(SpectralParams::from_cot(1.0, 0.5)) == 2.0);
  CHECK(q_of(SpectralParams::from_cot(0.0, 1.0)) == 1.0);
  for (int i = 0; i < 100; ++i) {
    const SpectralParams p(uniform(0, 5), uniform(0.01, 1.56));
    CHECK(p.q() >= 1.0);
    CHECK(p.q() == std::max(p.cot_alpha(), 1.0 / p.cot_alpha()));
  }
}

TEST_CASE("k_of examples and branch", "[core]") {
  CHECK_THAT(std::abs(k_of({0, 1}, 0.0) - cplx(0, 1)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(k_of({0, 2}, 1.0) - cplx(0, std::sqrt(5.0))), WithinAbs(0.0, 1e-14));
  // spectrum values are upper half-plane limits
  const cplx k2 = k_of(2.0, 1.0);
  CHECK(k2.imag() == 0.0);
  CHECK_THAT(k2.real(), WithinRel(std::sqrt(3.0), 1e-15));
  CHECK_THAT(std::abs(k_of({2.0, 1e-8}, 1.0) - k2), WithinAbs(0.0, 1e-7));
  const cplx km = k_of(-2.0, 1.0);
  CHECK_THAT(km.real(), WithinRel(-std::sqrt(3.0), 1e-15));
  CHECK_THAT(std::abs(k_of({-2.0, 1e-8}, 1.0) - km), WithinAbs(0.0, 1e-7));
  // gap: purely imaginary, decaying
  CHECK_THAT(std::abs(k_of(0.0, 1.0) - cplx(0, 1)), WithinAbs(0.0, 1e-15));

  CHECK_THROWS_AS(k_of(1.0, 1.0), SpectralEdgeError);
  CHECK_THROWS_AS(k_of(-1.0, 1.0), SpectralEdgeError);
  CHECK_THROWS_WITH(k_of(1.0, 1.0), Catch::Matchers::ContainsSubstring("kernel singular at spectral edge"));
}

TEST_CASE("Im k > 0 off the real axis", "[core][property]") {
  for (int i = 0; i < 10000; ++i) {
    const cplx z = testing_support::random_off_axis();
    const double m = uniform(0.0, 5.0);
    const cplx k = k_of(z, m);
    REQUIRE(k.imag() > 0.0);
    REQUIRE(std::abs(k * k - (z * z - m * m)) <= 1e-12 * std::max(1.0, std::abs(z * z)));
  }
}

TEST_CASE("zeta_of examples", "[core]") {
  const cplx z1 = zeta_of({0, 2}, 1.0);
  CHECK_THAT(std::abs(z1 - cplx(2, -1) / std::sqrt(5.0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(z1), WithinAbs(1.0, 1e-15));
  CHECK_THAT(std::abs(zeta_of({0, 1}, 0.0) - 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(zeta_of(2.0, 1.0).real(), WithinRel(std::sqrt(3.0), 1e-15));
  CHECK_THROWS_AS(zeta_of(-1.0, 1.0), SpectralEdgeError);
  for (int i = 0; i < 1000; ++i) {
    const double m = uniform(0.0, 3.0);
    const double u = (uniform(0, 1) < 0.5 ? -1 : 1) * (m + uniform(1e-3, 30));
    REQUIRE(testing_support::rel(k_of(u, m) * zeta_of(u, m), cplx(u + m)) <= 1e-12);
  }
}

TEST_CASE("op_norm examples", "[core]") {
  CHECK_THAT(op_norm(Mat2::diag(3.0, cplx(0, 4))), WithinAbs(4.0, 1e-15));
  CHECK_THAT(op_norm(Mat2::diag(3.0, -4.0)), WithinAbs(4.0, 1e-15));
  const Mat2 r1{cplx(0, 1), cplx(0, 1), -1.0, -1.0};
  CHECK_THAT(op_norm(r1), WithinAbs(2.0, 1e-14));
  CHECK_THAT(grid_norm(r1), WithinRel(2.0, 1e-4));
  CHECK(op_norm(Mat2::identity()) == 1.0);
  CHECK(op_norm(Mat2{}) == 0.0);
  CHECK_THROWS(op_norm(Mat2{std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0}));
  CHECK_THROWS(op_norm(Mat2{0.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0}));
}

TEST_CASE("op_norm against unit-vector maximisation", "[core][property]") {
  for (int i = 0; i < 20; ++i) {
    const Mat2 M = testing_support::random_mat();
    const double n = op_norm(M);
    const double g = grid_norm(M, 300);
    CHECK(g <= n * (1 + 1e-12));
    CHECK(testing_support::rel(g, n) < 1e-3);
  }
}

TEST_CASE("op_norm transpose and scaling invariance", "[core][property]") {
  for (int i = 0; i < 1000; ++i) {
    const Mat2 M = testing_support::random_mat();
    const cplx c(uniform(-4, 4), uniform(-4, 4));
    REQUIRE(testing_support::rel(op_norm(M.transpose()), op_norm(M)) <= 1e-12);
    REQUIRE(testing_support::rel(op_norm(c * M), std::abs(c) * op_norm(M)) <= 1e-12);
    REQUIRE(op_norm(M) * op_norm(M) <= M.frobenius_sq() * (1 + 1e-12));
  }
}

TEST_CASE("classify regions", "[core]") {
  CHECK(classify({1, 1}, 1.0) == RegionTag::ResolventSet);
  CHECK(classify(-3.0, 1.0) == RegionTag::SpectrumNegative);
  CHECK(classify(3.0, 1.0) == RegionTag::SpectrumPositive);
  CHECK(classify(1.0, 1.0) == RegionTag::Edge);
  CHECK(classify(-1.0, 1.0) == RegionTag::Edge);
  CHECK(classify(0.5, 1.0) == RegionTag::ResolventSet);
  CHECK(classify({3.0, 1e-12}, 1.0) == RegionTag::ResolventSet);
  CHECK(classify({3.0, 1e-12}, 1.0, 1e-9) == RegionTag::SpectrumPositive);
  CHECK(std::string(to_string(RegionTag::Edge)) == "Edge");
}
