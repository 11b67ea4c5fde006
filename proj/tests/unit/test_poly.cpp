#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "l4norm/poly.hpp"

using namespace l4norm;

namespace {

TruncatedPoly random_poly(std::mt19937& rng, int max_deg, int cap) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TruncatedPoly p(cap);
  for (int a = 0; a <= max_deg; ++a)
    for (int b = 0; a + b <= max_deg; ++b)
      for (int c = 0; a + b + c <= max_deg; ++c)
        for (int d = 0; a + b + c + d <= max_deg; ++d) p.add_term({a, b, c, d}, u(rng));
  return p;
}

std::array<double, 4> random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  return {u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(Poly, NegativeCapIsAContractError) { EXPECT_THROW(TruncatedPoly(-1), ContractError); }

TEST(Poly, ProductDropsTermsAboveCap) {
  const auto x = TruncatedPoly::variable(kXi, 2);
  const auto p = x * x * x;
  EXPECT_TRUE(p.empty());
  EXPECT_TRUE((x * x).respects_cap());
  EXPECT_EQ((x * x).coeff({2, 0, 0, 0}), 1.0);
}

// Evaluation is a ring homomorphism when the product stays within the cap.
TEST(Poly, EvaluationRespectsArithmetic) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_poly(rng, 2, 4);
    const auto b = random_poly(rng, 2, 4);
    const auto z = random_point(rng);
    EXPECT_NEAR((a * b).evaluate(z), a.evaluate(z) * b.evaluate(z), 1e-12);
    EXPECT_NEAR((a + b).evaluate(z), a.evaluate(z) + b.evaluate(z), 1e-13);
    EXPECT_NEAR((a * 3.0).evaluate(z), 3.0 * a.evaluate(z), 1e-13);
  }
}

TEST(Poly, DerivativeMatchesCentralDifference) {
  std::mt19937 rng(5);
  const auto p = random_poly(rng, 3, 3);
  const auto z = random_point(rng);
  for (int slot = 0; slot < 4; ++slot) {
    auto zp = z, zm = z;
    const double h = 1e-5;
    zp[static_cast<std::size_t>(slot)] += h;
    zm[static_cast<std::size_t>(slot)] -= h;
    EXPECT_NEAR(p.derivative(slot).evaluate(z), (p.evaluate(zp) - p.evaluate(zm)) / (2 * h), 1e-8);
  }
}

TEST(Poly, SlicesPartitionThePolynomial) {
  std::mt19937 rng(3);
  const auto p = random_poly(rng, 3, 3);
  TruncatedPoly sum(3);
  for (int d = 0; d <= 3; ++d) sum += p.slice(d);
  EXPECT_EQ(max_abs_difference(sum, p), 0.0);
  TruncatedPoly by_velocity(3);
  for (int k = 0; k <= 3; ++k) by_velocity += p.velocity_slice(k);
  EXPECT_EQ(max_abs_difference(by_velocity, p), 0.0);
}

TEST(Poly, ComposeWithIdentityIsIdentity) {
  std::mt19937 rng(9);
  const auto p = random_poly(rng, 3, 3);
  const std::array<TruncatedPoly, 4> id{TruncatedPoly::variable(0, 3), TruncatedPoly::variable(1, 3),
                                        TruncatedPoly::variable(2, 3), TruncatedPoly::variable(3, 3)};
  EXPECT_LT(max_abs_difference(compose(p, id, TruncatedPoly::constant(1.0, 3)), p), 1e-15);
}

TEST(Poly, ComposeWithNumbersIsEvaluation) {
  std::mt19937 rng(13);
  const auto p = random_poly(rng, 3, 3);
  const auto z = random_point(rng);
  EXPECT_NEAR(compose(p, z, 1.0), p.evaluate(z), 1e-14);
}

TEST(Poly, BinomialSeriesMatchesPower) {
  const int cap = 4;
  const auto s = TruncatedPoly::variable(kXi, cap) * 0.5 + TruncatedPoly::variable(kEta, cap) * 0.25;
  const auto b = binomial_series(s, -1.5);
  const std::array<double, 4> z{1e-2, -2e-2, 0.0, 0.0};
  const double exact = std::pow(1.0 + 0.5 * z[0] + 0.25 * z[1], -1.5);
  EXPECT_NEAR(b.evaluate(z), exact, 1e-10);
  EXPECT_THROW(binomial_series(TruncatedPoly::constant(1.0, cap), 0.5), ContractError);
}

// E = v . dL/dv - L; for L = (v^2 - q^2)/2 + q1 v2 the gyroscopic term drops out.
TEST(Poly, EnergyPolynomialOfOscillatorWithGyroscopicTerm) {
  const int cap = 3;
  const auto x = TruncatedPoly::variable(kXi, cap), y = TruncatedPoly::variable(kEta, cap);
  const auto xd = TruncatedPoly::variable(kXiDot, cap), yd = TruncatedPoly::variable(kEtaDot, cap);
  const auto L = (xd * xd + yd * yd - x * x - y * y) * 0.5 + x * yd;
  const auto expected = (xd * xd + yd * yd + x * x + y * y) * 0.5;
  EXPECT_LT(max_abs_difference(energy_polynomial(L), expected), 1e-15);
}
