#pragma once

// Spectral objectives f(lambda) and the one-dimensional search over the
// poured budget s for criteria that are not non-increasing.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"
#include "specdesign/waterfill.hpp"

namespace specdesign {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A symmetric convex function of the eigenvalues, given as a value oracle.
struct Criterion {
  std::string name;
  std::function<double(const Vector&)> eval;
  bool monotone_nonincreasing = false;
  bool requires_positive = false;  // eval is +inf when any coordinate <= 0
  std::optional<double> lipschitz_hint;

  double operator()(const Vector& lambda) const { return eval(lambda); }
};

namespace criteria {

inline bool any_nonpositive(const Vector& lambda) {
  return (lambda.array() <= 0.0).any();
}

/// sum 1/lambda_j
inline Criterion a_optimal() {
  return {"a-opt",
          [](const Vector& lambda) {
            if (any_nonpositive(lambda)) return kInf;
            return lambda.cwiseInverse().sum();
          },
          true, true, std::nullopt};
}

/// -sum log lambda_j
inline Criterion d_optimal() {
  return {"d-opt",
          [](const Vector& lambda) {
            if (any_nonpositive(lambda)) return kInf;
            double acc = 0.0;
            for (double v : lambda) acc -= std::log(v);
            return acc;
          },
          true, true, std::nullopt};
}

/// 1 / min_j lambda_j
inline Criterion e_optimal() {
  return {"e-opt",
          [](const Vector& lambda) {
            const double lo = lambda.minCoeff();
            if (lo <= 0.0) return kInf;
            return 1.0 / lo;
          },
          true, true, std::nullopt};
}

/// -sum lambda_j. Monotone and finite everywhere; handy in tests.
inline Criterion neg_sum() {
  return {"neg-sum", [](const Vector& lambda) { return -lambda.sum(); }, true, false, 1.0};
}

/// sum (lambda_j - target)^2. Convex, symmetric, not monotone.
inline Criterion squared_deviation(double target = 1.0) {
  return {"sq-dev",
          [target](const Vector& lambda) { return (lambda.array() - target).square().sum(); },
          false, false, std::nullopt};
}

/// Power sum with the sign chosen so the result is convex on the nonnegative
/// orthant:
///   p < 0       :  sum lambda^p   (non-increasing, +inf at 0)
///   0 < p < 1   : -sum lambda^p   (non-increasing)
///   p >= 1      :  sum lambda^p   (non-decreasing)
inline Criterion power_sum(double p, std::string name = "power-sum") {
  if (!std::isfinite(p) || p == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "power-sum exponent must be finite and nonzero");
  }
  const double sign = (p > 0.0 && p < 1.0) ? -1.0 : 1.0;
  Criterion c;
  c.name = std::move(name);
  c.monotone_nonincreasing = p < 1.0;
  c.requires_positive = p < 0.0;
  c.eval = [p, sign](const Vector& lambda) {
    double acc = 0.0;
    for (double v : lambda) {
      if (v <= 0.0) {
        if (p < 0.0) return kInf;
        v = 0.0;
      }
      acc += std::pow(v, p);
    }
    return sign * acc;
  };
  return c;
}

}  // namespace criteria

/// Look up a built-in criterion by name: a-opt, d-opt, e-opt, neg-sum.
inline Criterion builtin(const std::string& name) {
  if (name == "a-opt") return criteria::a_optimal();
  if (name == "d-opt") return criteria::d_optimal();
  if (name == "e-opt") return criteria::e_optimal();
  if (name == "neg-sum") return criteria::neg_sum();
  throw Error(ErrorCode::UnknownCriterion, "unknown criterion '" + name + "'");
}

struct BudgetSearchResult {
  double s_star = 0.0;
  double value = kInf;
  int iterations = 0;
};

/// g(s) = f(t + beta(s)).
inline double budget_objective(const Criterion& f, const Vector& t, const Caps& caps, double s) {
  return f(t + allocate(t, caps, s).beta);
}

inline double default_budget_tolerance(int k) { return 1e-9 * std::max(1, k); }

/// Minimizes the convex g(s) over [0, k]. Non-increasing criteria take the
/// whole budget; otherwise golden-section search until the bracket is
/// narrower than tol_s (200 iterations at most), followed by a 64-point grid
/// post-check.
inline BudgetSearchResult optimize_budget(const Criterion& f, const Vector& t, const Caps& caps,
                                          int k, double tol_s) {
  if (!(tol_s > 0.0)) throw Error(ErrorCode::BadRange, "tol_s must be positive");
  if (f.requires_positive) {
    const auto feas = feasibility(t, k, true);
    if (!feas) throw Error(ErrorCode::InfeasibleBudget, feas.message);
  }

  BudgetSearchResult out;
  const double hi_budget = static_cast<double>(k);
  if (f.monotone_nonincreasing) {
    out.s_star = hi_budget;
    out.value = budget_objective(f, t, caps, hi_budget);
    return out;
  }

  constexpr int kMaxIterations = 200;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double s) { return budget_objective(f, t, caps, std::clamp(s, 0.0, hi_budget)); };

  double lo = 0.0;
  double hi = hi_budget;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = g(x1);
  double g2 = g(x2);
  int it = 0;
  while (hi - lo > tol_s && it < kMaxIterations) {
    ++it;
    // Both probes infinite: more mass is what restores positivity.
    const bool move_right = (std::isinf(g1) && std::isinf(g2)) || g1 > g2;
    if (move_right) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = g(x1);
    }
  }

  out.iterations = it;
  out.s_star = g1 <= g2 ? x1 : x2;
  out.value = std::min(g1, g2);
  auto consider = [&](double s) {
    const double v = g(s);
    if (v < out.value) {
      out.value = v;
      out.s_star = s;
    }
  };
  consider(0.5 * (lo + hi));
  consider(0.0);
  consider(hi_budget);
  constexpr int kGrid = 64;
  for (int i = 1; i < kGrid - 1; ++i) consider(hi_budget * i / (kGrid - 1));
  return out;
}

}  // namespace specdesign
