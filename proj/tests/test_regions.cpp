#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "spatent/regions.hpp"

namespace {

using spatent::OverlapTable;
using spatent::Region;
using spatent::RegionSplit;

TEST(Regions, SymmetricSplitHalvesEveryMode) {
  for (int k : {0, 1, 3, 8}) {
    EXPECT_NEAR(spatent::region_probability(k, RegionSplit{}), 0.5, 1e-12) << k;
    EXPECT_NEAR(spatent::region_probability(k, RegionSplit{}, Region::B), 0.5, 1e-12) << k;
  }
}

TEST(Regions, GroundStateProbabilityMatchesErfc) {
  // phi_0^2 is a Gaussian of variance 1/2, so p_A = erfc(-a) / 2.
  const double expected = 0.5 * std::erfc(-1.0);
  EXPECT_NEAR(spatent::region_probability(0, RegionSplit{1.0}), expected, 1e-12);
  EXPECT_NEAR(expected, 0.9213503964748575, 1e-15);
}

TEST(Regions, KnownOverlapsAtSymmetricSplit) {
  const RegionSplit s{};
  EXPECT_NEAR(spatent::overlap(0, 1, s), -std::sqrt(2.0 / std::numbers::pi), 1e-10);
  EXPECT_NEAR(spatent::overlap(0, 1, s, Region::B), std::sqrt(2.0 / std::numbers::pi), 1e-10);
  EXPECT_NEAR(spatent::overlap(0, 2, s), 0.0, 1e-12);
  EXPECT_EQ(spatent::overlap(2, 2, s), 1.0);
}

TEST(Regions, BunchingOfTheLowestPairs) {
  const RegionSplit s{};
  const auto p01 = spatent::bunching_probabilities(0, 1, s);
  EXPECT_NEAR(p01.aa, 0.25 * (1.0 + 2.0 / std::numbers::pi), 1e-10);
  EXPECT_NEAR(p01.bb, p01.aa, 1e-10);
  EXPECT_NEAR(p01.ab, 0.5 - 1.0 / std::numbers::pi, 1e-10);

  const auto p02 = spatent::bunching_probabilities(0, 2, s);
  EXPECT_NEAR(p02.aa, 0.25, 1e-10);
  EXPECT_NEAR(p02.ab, 0.5, 1e-10);

  const auto p00 = spatent::bunching_probabilities(0, 0, s);
  EXPECT_NEAR(p00.aa, 0.25, 1e-12);
  EXPECT_NEAR(p00.bb, 0.25, 1e-12);
  EXPECT_NEAR(p00.ab, 0.5, 1e-12);
}

TEST(Regions, BosonsBunchRelativeToDistinguishableParticles) {
  for (double a : {-0.8, 0.0, 0.4}) {
    const RegionSplit s{a};
    for (int k = 0; k < 5; ++k)
      for (int l = 0; l < k; ++l) {
        const auto p = spatent::bunching_probabilities(k, l, s);
        const double pa_k = spatent::region_probability(k, s), pa_l = spatent::region_probability(l, s);
        EXPECT_GE(p.aa, pa_k * pa_l - 1e-14);
        EXPECT_NEAR(p.aa + p.bb + p.ab, 1.0, 1e-14);
        EXPECT_GE(p.ab, -1e-14);
      }
  }
}

TEST(Regions, SameParityOverlapsVanishAtSymmetricSplit) {
  const auto t = OverlapTable::quadrature(21, RegionSplit{});
  for (int k = 0; k <= 20; ++k)
    for (int l = 0; l < k; l += 1)
      if ((k - l) % 2 == 0) EXPECT_NEAR(t.overlap(k, l), 0.0, 1e-12) << k << "," << l;
}

class ClosedFormVsQuadrature : public ::testing::TestWithParam<double> {};

TEST_P(ClosedFormVsQuadrature, TablesAgree) {
  const RegionSplit s{GetParam()};
  const int K = 12;
  const auto cf = OverlapTable::closed_form(K, s);
  const auto qd = OverlapTable::quadrature(K, s);
  EXPECT_LT((cf.gram_a() - qd.gram_a()).cwiseAbs().maxCoeff(), 1e-11);
  for (int k = 0; k < K; ++k) {
    EXPECT_NEAR(cf.p_a(k), qd.p_a(k), 1e-11);
    EXPECT_NEAR(cf.p_b(k), qd.p_b(k), 1e-11);
  }
}

INSTANTIATE_TEST_SUITE_P(Splits, ClosedFormVsQuadrature, ::testing::Values(-1.5, -0.3, 0.0, 0.7, 2.0));

TEST(Regions, GramMatricesArePositiveSemidefinite) {
  for (double a : {-1.0, 0.0, 0.5}) {
    const auto t = OverlapTable::closed_form(30, RegionSplit{a});
    for (const Eigen::MatrixXd& g : {t.gram_a(), t.gram_b()}) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12) << "a=" << a;
      EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-12);
    }
  }
}

TEST(Regions, RegionsCompleteTheLine) {
  for (double a : {-1.0, 0.0, 0.6}) {
    const auto t = OverlapTable::closed_form(25, RegionSplit{a});
    const Eigen::MatrixXd sum = t.gram_a() + t.gram_b();
    EXPECT_LT((sum - Eigen::MatrixXd::Identity(25, 25)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Regions, OverlapsAreBoundedByOne) {
  const auto t = OverlapTable::closed_form(40, RegionSplit{0.3});
  const Eigen::MatrixXd o = t.overlap_matrix();
  EXPECT_LE(o.cwiseAbs().maxCoeff(), 1.0);
  for (int k = 0; k < 40; ++k) EXPECT_EQ(o(k, k), 1.0);
}

TEST(Regions, CorruptionScalesOffDiagonalOnly) {
  const auto t = OverlapTable::closed_form(4, RegionSplit{});
  const auto c = t.with_corrupted_overlaps(3.0);
  EXPECT_DOUBLE_EQ(c.gram_a()(1, 0), 3.0 * t.gram_a()(1, 0));
  EXPECT_DOUBLE_EQ(c.gram_a()(2, 2), t.gram_a()(2, 2));
  EXPECT_DOUBLE_EQ(c.p_a(3), t.p_a(3));
}

TEST(Regions, TruncationKeepsLeadingBlock) {
  const auto t = OverlapTable::closed_form(10, RegionSplit{0.2});
  const auto s = t.truncated(4);
  ASSERT_EQ(s.size(), 4);
  EXPECT_EQ(s.gram_a(), t.gram_a().topLeftCorner(4, 4));
}

TEST(Regions, OverlapNeedsSupport) {
  EXPECT_THROW(spatent::overlap(0, 1, RegionSplit{-40.0}), std::domain_error);
  EXPECT_THROW(spatent::region_probability(-1, RegionSplit{}), std::invalid_argument);
}

}  // namespace
