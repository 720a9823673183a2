#include <gtest/gtest.h>

#include <random>

#include "specdesign/designer.hpp"
#include "specdesign/waterfill.hpp"
#include "test_support.hpp"

using namespace specdesign;
using specdesign::oracle::worked_example_t;

TEST(WeylCaps, WorkedExample) {
  const Caps caps = weyl_caps(worked_example_t(), 2);
  EXPECT_EQ(caps.dhat, 2);
  ASSERT_EQ(caps.u.size(), 5u);
  EXPECT_EQ(caps.u[0], Capacity::at(1.1));
  EXPECT_EQ(caps.u[1], Capacity::at(1.3));
  EXPECT_EQ(caps.u[2], Capacity::at(3.0));
  EXPECT_TRUE(caps.u[3].is_unbounded());
  EXPECT_TRUE(caps.u[4].is_unbounded());
}

TEST(WeylCaps, LargeBudgetIsUncapped) {
  const Caps caps = weyl_caps(worked_example_t(), 5);
  for (const auto& u : caps.u) EXPECT_TRUE(u.is_unbounded());
  const Caps more = weyl_caps(worked_example_t(), 9);
  for (const auto& u : more.u) EXPECT_TRUE(u.is_unbounded());
}

TEST(WeylCaps, RankOneShift) {
  Vector t(3);
  t << 0.0, 2.0, 5.0;
  const Caps caps = weyl_caps(t, 1);
  EXPECT_EQ(caps.u[0], Capacity::at(2.0));
  EXPECT_EQ(caps.u[1], Capacity::at(5.0));
  EXPECT_TRUE(caps.u[2].is_unbounded());
}

TEST(FillAmount, WorkedExample) {
  const Vector t = worked_example_t();
  const Caps caps = weyl_caps(t, 2);
  EXPECT_NEAR(fill_amount(t, caps, 1.1), 0.1, 1e-12);
  EXPECT_EQ(fill_amount(t, caps, t(0)), 0.0);
  EXPECT_NEAR(fill_amount(t, caps, 2.05), 2.0, 1e-12);
}

TEST(WaterLevel, WorkedExample) {
  const Vector t = worked_example_t();
  const Caps caps = weyl_caps(t, 2);
  EXPECT_NEAR(water_level(t, caps, 2.0), 2.05, 1e-12);
  EXPECT_EQ(water_level(t, caps, 0.0), 1.0);
  EXPECT_NEAR(water_level(t, caps, 0.5), 1.3, 1e-12);
}

TEST(Allocate, WorkedExample) {
  const Vector t = worked_example_t();
  const Allocation a = allocate(t, weyl_caps(t, 2), 2.0);
  const double expected[] = {0.1, 0.2, 0.95, 0.75, 0.0};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(a.beta(j), expected[j], 1e-12) << j;
  const double compact[] = {1.05, 0.95, 0.0, 0.0, 0.0};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(a.beta_compact(j), compact[j], 1e-12) << j;
}

TEST(Allocate, ZeroBudget) {
  const Vector t = worked_example_t();
  const Allocation a = allocate(t, weyl_caps(t, 2), 0.0);
  EXPECT_EQ(a.beta.sum(), 0.0);
  EXPECT_EQ(a.level, 1.0);
}

TEST(Allocate, CapBindsAtFullBudget) {
  Vector t(2);
  t << 0.0, 1.0;
  const Allocation a = allocate(t, weyl_caps(t, 1), 1.0);
  EXPECT_NEAR(a.beta(0), 1.0, 1e-15);
  EXPECT_NEAR(a.beta(1), 0.0, 1e-15);
  EXPECT_NEAR(a.level, 1.0, 1e-15);
  EXPECT_NEAR(a.beta_compact(0), 1.0, 1e-15);
  EXPECT_EQ(a.beta_compact(1), 0.0);
}

TEST(Allocate, RejectsBudgetOutsideRange) {
  const Vector t = worked_example_t();
  const Caps caps = weyl_caps(t, 2);
  EXPECT_THROW(allocate(t, caps, -0.1), Error);
  EXPECT_THROW(allocate(t, caps, 2.5), Error);
}

TEST(CompactAllocation, EqualsFullWhenUncapped) {
  const Vector t = worked_example_t();
  const Caps caps = weyl_caps(t, 7);
  const Allocation a = allocate(t, caps, 4.0);
  EXPECT_LE((a.beta - a.beta_compact).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Feasibility, Examples) {
  Vector t(3);
  t << 0.0, 0.0, 1.0;
  const auto bad = feasibility(t, 1, true);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.zero_count, 2);
  EXPECT_NE(bad.message.find("= 2"), std::string::npos);
  EXPECT_TRUE(feasibility(t, 2, true).ok);
  EXPECT_TRUE(feasibility(t, 1, false).ok);
  Vector pos(2);
  pos << 0.5, 0.5;
  EXPECT_TRUE(feasibility(pos, 1, true).ok);
}

// Properties over random instances ------------------------------------------

TEST(WaterfillProperties, AgreesWithBisectionOracle) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 8;
    const int k = 1 + (trial / 8) % 10;
    const Vector t = oracle::random_ascending(d, rng);
    const Caps caps = weyl_caps(t, k);
    const double s = k * frac(rng);
    const double c = water_level(t, caps, s);
    EXPECT_NEAR(c, oracle::bisect_level(t, k, s), 1e-9 * std::max(1.0, c));
    EXPECT_NEAR(fill_amount(t, caps, c), s, 1e-12 * std::max(1.0, s) * 10);
  }
}

TEST(WaterfillProperties, RoundTripAndMonotone) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 1 + trial % 9;
    const int k = 1 + trial % 6;
    const Vector t = oracle::random_ascending(d, rng);
    const Caps caps = weyl_caps(t, k);
    double s1 = k * frac(rng);
    double s2 = k * frac(rng);
    if (s1 > s2) std::swap(s1, s2);
    EXPECT_LE(water_level(t, caps, s1), water_level(t, caps, s2));
    const Allocation a1 = allocate(t, caps, s1);
    const Allocation a2 = allocate(t, caps, s2);
    for (int j = 0; j < d; ++j) EXPECT_LE(a1.beta(j), a2.beta(j) + 1e-12);
    EXPECT_NEAR(fill_amount(t, caps, water_level(t, caps, s2)), s2, 1e-12 * std::max(1.0, s2) * 10);
  }
}

TEST(WaterfillProperties, AllocationInvariants) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 10;
    const int k = 1 + (trial * 7) % 12;
    const Vector t = oracle::random_ascending(d, rng);
    const Caps caps = weyl_caps(t, k);
    const double s = k * frac(rng);
    const Allocation a = allocate(t, caps, s);
    EXPECT_NEAR(a.beta.sum(), s, 1e-10 * std::max(1, k));
    int support = 0;
    for (int j = 0; j < d; ++j) {
      EXPECT_GE(a.beta(j), 0.0);
      EXPECT_GE(a.beta_compact(j), 0.0);
      if (caps.u[j].is_finite()) { EXPECT_LE(t(j) + a.beta(j), caps.u[j].value() + 1e-12); }
      support += a.beta_compact(j) > 0.0 ? 1 : 0;
    }
    EXPECT_LE(support, std::min(d, k));
    const auto full = oracle::sorted(t + a.beta);
    const auto compact = oracle::sorted(t + a.beta_compact);
    for (int j = 0; j < d; ++j) EXPECT_NEAR(full[j], compact[j], 1e-10) << "trial " << trial;
  }
}

TEST(WaterfillProperties, WeylSandwichForRandomDesigns) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 6;
    const int k = 1 + (trial / 6) % 5;
    const Vector t = oracle::random_ascending(d, rng);
    const Matrix x = random_ball_design(d, k, rng);
    const Vector lambda = eigenvalues_ascending(SymMatrix(Matrix(t.asDiagonal()) + x * x.transpose()));
    const Caps caps = weyl_caps(t, k);
    for (int j = 0; j < d; ++j) {
      EXPECT_GE(lambda(j), t(j) - 1e-8);
      if (caps.u[j].is_finite()) { EXPECT_LE(lambda(j), caps.u[j].value() + 1e-8); }
    }
  }
}

TEST(WaterfillProperties, WaterFillIsMajorizedByEveryBoxPoint) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 8;
    const int k = 1 + (trial / 8) % 6;
    const Vector t = oracle::random_ascending(d, rng);
    const double s = k * frac(rng);
    const Allocation a = allocate(t, weyl_caps(t, k), s);
    const Vector y = oracle::random_box_point(t, k, s, rng);
    EXPECT_TRUE(majorizes(t + a.beta, y)) << "trial " << trial;
  }
}
