#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "becl/scaling.hpp"

using namespace becl::scaling;

TEST(VOfBeta, OneThirdIsExactlyTwo) {
  const Rational third(1, 3);
  EXPECT_EQ(v_of_beta(third), Rational(2));
  const auto b = branches(third);
  EXPECT_EQ(b[0], Rational(1));
  EXPECT_EQ(b[1], Rational(2));
  EXPECT_EQ(b[2], Rational(3, 2));
  EXPECT_EQ(b[3], Rational(2));
  EXPECT_EQ(active_branches(third), (std::vector<int>{1, 3}));
}

TEST(VOfBeta, OneTenthIsFourAndAHalf) {
  EXPECT_EQ(v_of_beta(Rational(1, 10)), Rational(9, 2));
  EXPECT_EQ(active_branches(Rational(1, 10)), (std::vector<int>{0}));
  EXPECT_NEAR(v_of_beta(0.1), 4.5, 1e-14);
}

TEST(VOfBeta, FloatAgreesWithRational) {
  for (int num = 1; num < 40; ++num) {
    const Rational b(num, 100);
    EXPECT_NEAR(v_of_beta(num / 100.0), static_cast<double>(v_of_beta(b)), 1e-12) << num;
  }
}

TEST(VOfBeta, DomainErrors) {
  EXPECT_THROW(v_of_beta(0.4), std::domain_error);
  EXPECT_THROW(v_of_beta(0.0), std::domain_error);
  EXPECT_THROW(v_of_beta(-0.1), std::domain_error);
  EXPECT_THROW(v_of_beta(Rational(2, 5)), std::domain_error);
  EXPECT_THROW(v_of_beta(Rational(0)), std::domain_error);
}

TEST(VOfBeta, FloatTieDetection) {
  const auto idx = active_branches(1.0 / 3.0);
  EXPECT_EQ(idx, (std::vector<int>{1, 3}));
}

TEST(ConstraintLedger, OmegaOneLargeN) {
  const auto l = constraint_ledger({0.2, 0.1, 1e6, 1.0}, 1);
  EXPECT_TRUE(l.all_hold());
  // omega = 1 reduces to powers of N.
  EXPECT_NEAR(l.checks[0].lhs, std::pow(1e6, 2.5 * 0.2 - 1.0), 1e-15);
  EXPECT_NEAR(l.checks[1].lhs, std::pow(1e6, 0.2 - 1.0), 1e-15);
  EXPECT_NEAR(l.checks[2].lhs, std::pow(1e6, 2 * 0.2 - 1.0), 1e-15);
}

TEST(ConstraintLedger, DepthZeroHoldsVacuously) {
  const auto l = constraint_ledger({0.3, 0.1, 2.0, 1e4}, 0);
  EXPECT_TRUE(l.all_hold());
  for (const auto& c : l.checks) EXPECT_TRUE(std::isinf(c.rhs));
}

TEST(ConstraintLedger, RatiosDecreaseInN) {
  for (double beta : {0.05, 0.2, 0.35}) {
    std::array<double, 3> prev{};
    bool first = true;
    for (double n : {10.0, 1e2, 1e3, 1e4, 1e5}) {
      const auto l = constraint_ledger({beta, 0.1, n, 16.0}, 3);
      for (int i = 0; i < 3; ++i) {
        if (!first) EXPECT_LT(l.checks[i].ratio, prev[i]);
        prev[i] = l.checks[i].ratio;
      }
      first = false;
    }
  }
}

TEST(ConstraintLedger, RejectsInvalidParams) {
  EXPECT_THROW(constraint_ledger({0.5, 0.1, 10, 1}, 1), std::domain_error);
  EXPECT_THROW(constraint_ledger({0.2, 0.1, 10, 1}, -1), std::domain_error);
  EXPECT_THROW(constraint_ledger({0.2, 0.1, 10, 0.5}, 1), std::domain_error);
}

TEST(RegionTable, MatchesBruteForcePerRow) {
  const auto grid = beta_grid(1000);
  const auto rows = region_table(grid);
  ASSERT_EQ(rows.size(), 1000u);
  for (const auto& r : rows) {
    const double b = r.beta;
    const double b1 = (1 - b) / (2 * b);
    const double b2 = (1.25 * b - 1.0 / 12.0) / (1 - 2.5 * b);
    const double b3 = (0.5 * b + 5.0 / 6.0) / (1 - b);
    const double b4 = (b + 1.0 / 3.0) / (1 - 2 * b);
    const double v = std::max({b1, b2, b3, b4});
    EXPECT_NEAR(r.v, v, 1e-12 * v);
    EXPECT_NEAR(r.branch[0], b1, 1e-12 * std::abs(b1));
    EXPECT_NEAR(r.branch[1], b2, 1e-12 * std::max(1.0, std::abs(b2)));
  }
}

TEST(RegionTable, VIsThePointwiseMax) {
  for (const auto& r : region_table(beta_grid(1000))) {
    bool attained = false;
    for (double b : r.branch) {
      EXPECT_GE(r.v, b);
      attained |= (b == r.v);
    }
    EXPECT_TRUE(attained);
  }
}

TEST(RegionTable, BranchTwoDivergesAtUpperEnd) {
  const auto near = branch_values(0.4 - 1e-9);
  EXPECT_GT(near[1], 1e7);
  EXPECT_EQ(v_of_beta(0.4 - 1e-9), near[1]);
}

TEST(RegionTable, MinimumIsInterior) {
  const auto rows = region_table(beta_grid(1000));
  const auto it = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.v < b.v; });
  EXPECT_NE(it, rows.begin());
  EXPECT_NE(it, rows.end() - 1);
  EXPECT_GT(it->beta, 0.0);
  EXPECT_LT(it->beta, 0.4);
}

TEST(Admissible, Definition) {
  const ScalingParams s{0.2, 0.1, 1000.0, 4.0};
  EXPECT_EQ(admissible(s), 1000.0 >= std::pow(4.0, v_of_beta(0.2) + 0.1));
  EXPECT_FALSE(admissible({0.2, 0.1, 1.0, 100.0}));
  EXPECT_TRUE(admissible({0.2, 0.1, 1.0, 1.0}));
}

TEST(Admissible, MonotoneInN) {
  for (double beta : {0.1, 0.25, 0.33})
    for (double w : {2.0, 10.0, 50.0}) {
      bool seen = false;
      for (double n = 1.0; n < 1e9; n *= 3.0) {
        const bool a = admissible({beta, 0.1, n, w});
        if (seen) EXPECT_TRUE(a);
        seen |= a;
      }
    }
}
