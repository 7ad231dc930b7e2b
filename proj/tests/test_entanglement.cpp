#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "spatent/entanglement.hpp"

namespace {

using spatent::OverlapTable;
using spatent::RegionSplit;

TEST(Mixture, WeightsOfTwoEquallyFilledModes) {
  const std::vector<double> n{1.0, 1.0};
  const auto m = spatent::mixture_weights(n);
  EXPECT_DOUBLE_EQ(m.normalization, 5.0);
  EXPECT_DOUBLE_EQ(m.diagonal_weight(0), 0.4);
  EXPECT_DOUBLE_EQ(m.diagonal_weight(1), 0.4);
  EXPECT_DOUBLE_EQ(m.pair_weight(1, 0), 0.2);
  EXPECT_DOUBLE_EQ(m.weight_sum(), 1.0);
}

TEST(Mixture, WeightsSumToOneForThermalStates) {
  for (double T : {0.1, 2.0, 30.0}) {
    const auto s = spatent::make_thermal_state(T, 10.0, 1e-6);
    EXPECT_NEAR(spatent::mixture_weights(s).weight_sum(), 1.0, 1e-12) << T;
  }
}

TEST(Mixture, RejectsNegativeOccupations) {
  const std::vector<double> n{1.0, -0.1};
  EXPECT_THROW(spatent::pair_normalization(n), std::domain_error);
}

TEST(ChiNorm, GroundStateOnly) {
  const auto t = OverlapTable::closed_form(1, RegionSplit{});
  for (double N : {1.0, 3.0, 40.0}) {
    const std::vector<double> n{N};
    EXPECT_NEAR(spatent::chi_norm_squared(n, t), 0.25 * std::pow(N, 4), 1e-12 * std::pow(N, 4));
    EXPECT_NEAR(spatent::coherent_bunching_norm_squared(n, t), 0.25 * std::pow(N, 4),
                1e-12 * std::pow(N, 4));
    // lambda = (N^2 / 2) / (2 N^2)
    EXPECT_NEAR(std::sqrt(spatent::coherent_bunching_norm_squared(n, t)) / spatent::pair_normalization(n),
                0.25, 1e-14);
  }
}

TEST(ChiNorm, EmptyTrapGivesZero) {
  const auto t = OverlapTable::closed_form(3, RegionSplit{});
  const std::vector<double> n{0.0, 0.0, 0.0};
  EXPECT_EQ(spatent::chi_norm_squared(n, t), 0.0);
  EXPECT_EQ(spatent::coherent_bunching_norm_squared(n, t), 0.0);
}

TEST(ChiNorm, FastTripleSumMatchesDirect) {
  const auto t = OverlapTable::closed_form(9, RegionSplit{});
  const std::vector<double> n{3.0, 1.7, 0.9, 0.55, 0.3, 0.21, 0.1, 0.04, 0.02};
  const double fast = spatent::chi_norm_squared(n, t);
  const double slow = spatent::chi_norm_squared_direct(n, t);
  EXPECT_NEAR(fast, slow, 1e-13 * slow);
}

TEST(ChiNorm, TripleSumGrowsWhenAModeIsAdded) {
  const auto t = OverlapTable::closed_form(6, RegionSplit{});
  std::vector<double> n{2.0, 1.0, 0.5, 0.25, 0.125};
  double prev = 0.0;
  for (std::size_t K = 1; K <= n.size(); ++K) {
    const std::span<const double> head(n.data(), K);
    const double v = spatent::chi_norm_squared(head, t);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ChiNorm, TripleSumNeedsSymmetricSplit) {
  const auto t = OverlapTable::closed_form(3, RegionSplit{0.5});
  const std::vector<double> n{1.0, 0.5, 0.2};
  EXPECT_THROW(spatent::chi_norm_squared(n, t), std::invalid_argument);
  EXPECT_NO_THROW(spatent::coherent_bunching_norm_squared(n, t));
}

TEST(ChiNorm, CoherentNormIsInvariantUnderReflection) {
  // Swapping A and B (a -> -a) leaves the coherent block unchanged.
  const std::vector<double> n{1.4, 0.8, 0.5, 0.3, 0.1};
  const double plus = spatent::coherent_bunching_norm_squared(n, OverlapTable::closed_form(5, RegionSplit{0.6}));
  const double minus = spatent::coherent_bunching_norm_squared(n, OverlapTable::closed_form(5, RegionSplit{-0.6}));
  EXPECT_NEAR(plus, minus, 1e-12 * plus);
}

TEST(Lambda, ZeroTemperatureLimit) {
  for (double N : {1.0, 10.0, 100.0}) {
    const auto r = spatent::lambda_lower_bound(0.01, N);
    EXPECT_NEAR(r.lambda, 0.25, 1e-3) << N;
    EXPECT_NEAR(r.lambda_printed, 0.25, 1e-3) << N;
    EXPECT_NEAR(r.condensate_fraction, 1.0, 1e-6);
  }
}

TEST(Lambda, PositiveAcrossTemperatures) {
  for (double T : {0.1, 1.0, 10.0, 60.0}) {
    const auto r = spatent::lambda_lower_bound(T, 10.0);
    EXPECT_GT(r.lambda, 0.0) << T;
    EXPECT_LE(r.lambda, 0.5);
    EXPECT_GT(r.lambda_printed, 0.0);
    EXPECT_TRUE(std::isfinite(r.truncation_error_estimate));
  }
}

TEST(Lambda, PrintedValueOmittedOffSymmetricSplit) {
  const auto r = spatent::lambda_lower_bound(1.0, 10.0, 1e-8, RegionSplit{0.4});
  EXPECT_TRUE(std::isnan(r.lambda_printed));
  EXPECT_GT(r.lambda, 0.0);
}

TEST(Lambda, RejectsNonPositiveTemperature) {
  EXPECT_THROW(spatent::lambda_lower_bound(0.0, 10.0), std::domain_error);
}

TEST(Entropy, ShannonOfKnownDistributions) {
  const double quarter_quarter_half[] = {0.25, 0.25, 0.5};
  EXPECT_NEAR(spatent::shannon_entropy_bits(quarter_quarter_half), 1.5, 1e-15);
  const double certain[] = {1.0, 0.0};
  EXPECT_EQ(spatent::shannon_entropy_bits(certain), 0.0);
}

TEST(Entropy, PurePairAnchors) {
  EXPECT_NEAR(spatent::pure_pair_entropy(0, 0, RegionSplit{}), 1.5, 1e-6);
  EXPECT_NEAR(spatent::pure_pair_entropy(0, 2, RegionSplit{}), 2.0, 1e-6);
}

TEST(Entropy, FarSplitLeavesProductState) {
  EXPECT_LT(spatent::pure_pair_entropy(0, 0, RegionSplit{6.0}), 1e-4);
  EXPECT_LT(spatent::pure_pair_entropy(0, 0, RegionSplit{-6.0}), 1e-4);
}

TEST(Entropy, SplitScanIsSymmetricAndPeaksAtCentre) {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-2.0 + 0.1 * i);
  grid[20] = 0.0;
  const auto scan = spatent::split_scan_entropy(0, grid);
  std::size_t best = 0;
  for (std::size_t i = 0; i < scan.size(); ++i)
    if (scan[i].entropy > scan[best].entropy) best = i;
  EXPECT_EQ(best, 20u);
  for (std::size_t i = 0; i < scan.size(); ++i)
    EXPECT_NEAR(scan[i].entropy, scan[scan.size() - 1 - i].entropy, 1e-8);
}

TEST(Entropy, DistinctModePairsAreBoundedByTwoBitsPerSector) {
  // The A side of a two-boson state has at most 1 + 2 + 3 basis states.
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < k; ++l) {
      const double s = spatent::pure_pair_entropy(k, l, RegionSplit{0.3});
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, std::log2(6.0) + 1e-12);
    }
}

}  // namespace
