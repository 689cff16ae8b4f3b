#include <gtest/gtest.h>

#include "pldc/discrepancy.hpp"
#include "support.hpp"

using namespace pldc;
using pldc::testing::rel_diff;

namespace {

RowMatrix gaussian(std::uint64_t seed, Index n, Index d) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RowMatrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) x(i, k) = g(rng);
  return x;
}

}  // namespace

TEST(Discrepancy, TwoPointHandValue) {
  RowMatrix x(2, 1);
  x << 0, 1;
  const DiscrepancyResult r = discrepancy(x, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-6);
  EXPECT_NEAR(discrepancy(x, 2.0).value, 4.0, 1e-6);
}

TEST(Discrepancy, IdenticalPointsGiveZero) {
  const RowMatrix x = RowMatrix::Constant(6, 2, 0.7);
  EXPECT_EQ(discrepancy(x, 1.0).value, 0.0);
}

TEST(Discrepancy, ZeroBudgetGivesZero) { EXPECT_EQ(discrepancy(gaussian(1, 6, 2), 0.0).value, 0.0); }

TEST(Discrepancy, ScalingLaw) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const RowMatrix x = gaussian(10 + seed, 8, 2);
    const double base = discrepancy(x, 1.0).value;
    for (double L : {0.5, 2.0, 10.0}) EXPECT_LT(rel_diff(discrepancy(x, L).value, L * base), 1e-8);
  }
}

TEST(Discrepancy, TranslationInvariant) {
  const RowMatrix x = gaussian(20, 8, 2);
  RowMatrix shifted = x;
  shifted.rowwise() += Eigen::RowVector2d(3.0, -5.0);
  EXPECT_LT(rel_diff(discrepancy(x, 1.0).value, discrepancy(shifted, 1.0).value), 1e-8);
}

TEST(Discrepancy, SwappingHalvesKeepsValue) {
  const RowMatrix x = gaussian(21, 8, 1);
  std::vector<Index> fwd(8), rev(8);
  for (Index i = 0; i < 8; ++i) {
    fwd[static_cast<std::size_t>(i)] = i;
    rev[static_cast<std::size_t>(i)] = (i + 4) % 8;
  }
  EXPECT_LT(rel_diff(discrepancy(x, 1.0, fwd).value, discrepancy(x, 1.0, rev).value), 1e-8);
}

TEST(Discrepancy, NonNegativeAndOddDrop) {
  const RowMatrix x = gaussian(22, 7, 2);
  const DiscrepancyResult r = discrepancy(x, 1.0);
  EXPECT_GE(r.value, 0.0);
  ASSERT_TRUE(r.dropped.has_value());
  EXPECT_EQ(*r.dropped, 6);
  EXPECT_EQ(r.order.size(), 6u);
}

TEST(Discrepancy, RandomSplitIsPermutation) {
  auto p = random_split(10, 3);
  EXPECT_EQ(p, random_split(10, 3));
  std::sort(p.begin(), p.end());
  for (Index i = 0; i < 10; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], i);
}

TEST(Grid, Arithmetic) {
  const auto g = lambda_grid_from(2.0, 1.0);
  ASSERT_EQ(g.size(), 10u);
  EXPECT_EQ(g.front(), 512.0);
  EXPECT_EQ(g.back(), 1.0);
  for (double v : lambda_grid_from(2.0, 0.0)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(theoretical_lambda(2.0, 1.0), 48.0);
}
