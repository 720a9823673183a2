#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "specdesign/designer.hpp"
#include "test_support.hpp"

using namespace specdesign;
using specdesign::oracle::worked_example_t;

namespace {

void expect_feasible(const DesignResult& r, int d, int k) {
  ASSERT_EQ(r.X.rows(), d);
  ASSERT_EQ(r.X.cols(), k);
  for (int i = 0; i < k; ++i) EXPECT_LE(r.X.col(i).squaredNorm(), 1.0 + 1e-10);
}

}  // namespace

TEST(OptimalDesign, WorkedExample) {
  const SymMatrix a = SymMatrix::diagonal(worked_example_t());
  const DesignResult r = optimal_design(a, 2, builtin("d-opt"));
  expect_feasible(r, 5, 2);
  EXPECT_EQ(r.s_star, 2.0);
  const double expected[] = {1.1, 1.3, 2.05, 2.05, 3.0};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(r.eigenvalues_after(j), expected[j], 1e-12);
  EXPECT_NEAR(r.objective, r.lower_bound, 1e-12);
}

TEST(OptimalDesign, EOptimalHalfIdentity) {
  const SymMatrix a = SymMatrix::diagonal(Vector::Constant(2, 0.5));
  const DesignResult r = optimal_design(a, 1, builtin("e-opt"));
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
  EXPECT_NEAR(r.lower_bound, 2.0, 1e-12);
}

TEST(OptimalDesign, ZeroPriorGivesTightFrame) {
  const DesignResult r = optimal_design(SymMatrix::zero(2), 3, builtin("a-opt"));
  expect_feasible(r, 2, 3);
  EXPECT_NEAR(r.objective, 4.0 / 3.0, 1e-12);
  EXPECT_LE(max_abs(Matrix(r.X * r.X.transpose() - 1.5 * Matrix::Identity(2, 2))), 1e-10);
}

TEST(OptimalDesign, InfeasibleBudget) {
  Vector t(3);
  t << 0.0, 0.0, 1.0;
  try {
    optimal_design(SymMatrix::diagonal(t), 1, builtin("a-opt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleBudget);
    EXPECT_NE(std::string(e.what()).find("= 2"), std::string::npos);
  }
  // neg-sum is finite everywhere, so the same budget is fine.
  EXPECT_NO_THROW(optimal_design(SymMatrix::diagonal(t), 1, builtin("neg-sum")));
}

TEST(OptimalDesign, NonMonotoneStopsAtTheTarget) {
  const DesignResult r =
      optimal_design(SymMatrix::diagonal(Vector::Constant(2, 1.0)), 4, criteria::squared_deviation());
  EXPECT_NEAR(r.s_star, 0.0, 1e-9);
  EXPECT_NEAR(r.objective, 0.0, 1e-12);
  EXPECT_LE(max_abs(r.X), 1e-4);
}

TEST(VerifyDesign, OptimalPassesAndZeroDesignFails) {
  const SymMatrix a = SymMatrix::diagonal(worked_example_t());
  const DesignResult r = optimal_design(a, 2, builtin("d-opt"));
  const VerifyReport ok = verify_design(a, r.X, builtin("d-opt"), 2000, 1);
  EXPECT_TRUE(ok.weyl_ok);
  EXPECT_TRUE(ok.unit_ball_ok);
  EXPECT_LE(ok.bound_gap, 1e-9);
  EXPECT_EQ(ok.sampled_better_designs, 0);

  const VerifyReport zero = verify_design(a, Matrix::Zero(5, 2), builtin("d-opt"), 2000, 1);
  EXPECT_TRUE(zero.weyl_ok);
  EXPECT_GT(zero.bound_gap, 0.1);
  EXPECT_GT(zero.sampled_better_designs, 0);
}

TEST(VerifyDesign, FlagsLongColumns) {
  const SymMatrix a = SymMatrix::identity(2);
  Matrix x = Matrix::Zero(2, 1);
  x(0, 0) = 1.5;
  const VerifyReport rep = verify_design(a, x, builtin("a-opt"), 0);
  EXPECT_FALSE(rep.unit_ball_ok);
  EXPECT_THROW(verify_design(a, Matrix::Zero(3, 1), builtin("a-opt"), 0), Error);
}

TEST(Majorizes, Examples) {
  Vector x(2), y(2);
  x << 1.0, 1.0;
  y << 2.0, 0.0;
  EXPECT_TRUE(majorizes(x, y));
  EXPECT_FALSE(majorizes(y, x));
  y << 1.5, 0.0;
  EXPECT_FALSE(majorizes(x, y));
  EXPECT_THROW(majorizes(x, Vector::Zero(3)), Error);
}

TEST(DesignerProperties, CertificateTightRandomPriors) {
  std::mt19937_64 rng(71);
  const char* names[] = {"a-opt", "d-opt", "e-opt"};
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 1 + trial % 6;
    const int k = 1 + (trial / 6) % 8;
    const int rank = trial % 3 == 0 ? d : std::max(0, d - 1 - trial % 2);
    const SymMatrix a = oracle::random_psd(d, rank, rng);
    const Criterion f = builtin(names[trial % 3]);
    if (!feasibility(eigh_ascending(a).t, k, true)) continue;
    const DesignResult r = optimal_design(a, k, f);
    expect_feasible(r, d, k);
    EXPECT_LE(r.objective - r.lower_bound, 1e-8 * std::max(1.0, std::abs(r.lower_bound))) << trial;
  }
}

TEST(DesignerProperties, CriterionIndependentForMonotone) {
  // With s* = k for every non-increasing criterion, the constructed spectrum
  // does not depend on which one is used.
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 5;
    const int k = d + trial % 3;
    const SymMatrix a = oracle::random_psd(d, d, rng);
    const Vector l_a = optimal_design(a, k, builtin("a-opt")).eigenvalues_after;
    const Vector l_d = optimal_design(a, k, builtin("d-opt")).eigenvalues_after;
    const Vector l_e = optimal_design(a, k, builtin("e-opt")).eigenvalues_after;
    EXPECT_LE((l_a - l_d).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((l_a - l_e).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(DesignerProperties, RotationInvariant) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 5;
    const int k = 1 + trial % 6;
    const SymMatrix a = oracle::random_psd(d, d, rng);
    const Matrix u = oracle::random_orthonormal(d, rng);
    const SymMatrix b(u * a.matrix() * u.transpose());
    const double fa = optimal_design(a, k, builtin("d-opt")).objective;
    const double fb = optimal_design(b, k, builtin("d-opt")).objective;
    EXPECT_NEAR(fa, fb, 1e-9 * std::max(1.0, std::abs(fa)));
  }
}

TEST(DesignerProperties, NoRandomDesignBeatsTheCertificate) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + trial % 2;
    const int k = 1 + trial % 3;
    const SymMatrix a = oracle::random_psd(d, d, rng);
    for (const char* name : {"a-opt", "d-opt", "e-opt"}) {
      const Criterion f = builtin(name);
      const double best = optimal_design(a, k, f).objective;
      for (int i = 0; i < 2000; ++i) {
        const Matrix x = random_ball_design(d, k, rng);
        EXPECT_GE(design_objective(a, x, f), best - 1e-9) << name;
      }
    }
  }
}

TEST(DesignerProperties, ExactWhenBudgetCoversDimension) {
  // k >= d: all buckets are uncapped, so the design lifts the smallest
  // eigenvalues to a common level.
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 5;
    const int k = d + trial % 4;
    const Vector t = oracle::random_ascending(d, rng, 0.3);
    const SymMatrix a = oracle::psd_with_spectrum(t, rng);
    const DesignResult r = optimal_design(a, k, builtin("a-opt"));
    const double c = oracle::bisect_level(t, k, k);
    for (int j = 0; j < d; ++j) {
      EXPECT_NEAR(r.eigenvalues_after(j), std::max(c, t(j)), 1e-8 * std::max(1.0, c));
    }
  }
}
