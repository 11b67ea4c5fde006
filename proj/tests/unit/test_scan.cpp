#include <cmath>

#include <gtest/gtest.h>

#include "l4norm/scan.hpp"

using namespace l4norm;

namespace {

ModelParams classical(double mu) { return ModelParams::perturbed(mu, 0.0, 0.0, 0.0); }

}  // namespace

TEST(Scan, GridEndpointsAndEmptyRange) {
  const auto g = mu_grid(0.001, 0.038, 400);
  ASSERT_EQ(g.size(), 400u);
  EXPECT_EQ(g.front(), 0.001);
  EXPECT_NEAR(g.back(), 0.038, 1e-17);
  EXPECT_TRUE(mu_grid(0.01, 0.02, 0).empty());
  EXPECT_TRUE(mu_grid(0.02, 0.01, 10).empty());
  EXPECT_EQ(mu_grid(0.01, 0.02, 1).size(), 1u);
}

TEST(Scan, ParallelResultsKeepInputOrder) {
  const auto r = ordered_parallel(64, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], static_cast<int>(i * i));
}

TEST(Scan, ResonancePairsAreReducedAndMixedSign) {
  const auto pairs = resonance_pairs();
  EXPECT_EQ(pairs.size(), 5u);  // (1,-1) (1,-2) (1,-3) (2,-1) (3,-1)
  for (auto [k1, k2] : pairs) {
    EXPECT_GT(k1, 0);
    EXPECT_LT(k2, 0);
    EXPECT_LE(k1 - k2, kMoserOrder);
  }
}

TEST(Scan, ClassicalInteriorResonances) {
  const auto s = resonance_scan(classical, 0.001, 0.038, 400);
  ASSERT_EQ(s.crossings.size(), 2u);
  EXPECT_FALSE(s.any_unstable);
  for (const auto& c : s.crossings) {
    if (c.k2 == -3) EXPECT_NEAR(c.mu, 0.0135160, 1e-6);
    if (c.k2 == -2) EXPECT_NEAR(c.mu, 0.0242939, 1e-6);
    EXPECT_NEAR(c.k1 * c.w.omega1 + c.k2 * c.w.omega2, 0.0, 1e-8);
    EXPECT_FALSE(moser_check(c.w).pass);
  }
}

TEST(Scan, RowsPastStabilityBoundAreMarked) {
  const auto s = resonance_scan(classical, 0.03, 0.05, 5);
  EXPECT_TRUE(s.any_unstable);
  EXPECT_TRUE(s.rows.front().stable);
  EXPECT_FALSE(s.rows.back().stable);
}

TEST(Scan, EmptyRangeHasNoRows) {
  const auto s = resonance_scan(classical, 0.01, 0.02, 0);
  EXPECT_TRUE(s.rows.empty());
  EXPECT_TRUE(s.crossings.empty());
}
