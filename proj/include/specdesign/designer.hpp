#pragma once

// End-to-end optimal spectral design and its certificate.
//
// Pipeline: eigendecompose the prior A = Q diag(t) Q^T, water-fill t under the
// Weyl capacities, pick the budget s* (all of k for non-increasing criteria),
// compact the increments onto dhat coordinates, factor diag(beta') into k
// unit-ball columns Z and rotate back with X = Q Z. The water-fill value
// f(t + beta(s*)) is a lower bound over all feasible designs, so the gap
// between the achieved objective and that value certifies optimality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "specdesign/construct.hpp"
#include "specdesign/criteria.hpp"
#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"
#include "specdesign/waterfill.hpp"

namespace specdesign {

struct DesignResult {
  Matrix X;  // d x k
  double objective = kInf;
  double lower_bound = kInf;
  double s_star = 0.0;
  Vector eigenvalues_before;
  Vector eigenvalues_after;
  double budget_tol = 0.0;
  Vector beta_compact;
};

struct VerifyReport {
  bool weyl_ok = false;
  bool unit_ball_ok = false;
  double bound_gap = kInf;
  long sampled_better_designs = 0;
  double objective = kInf;
  double lower_bound = kInf;
};

/// Largest finite slope of g over a coarse grid on [0, k]; 0 when g is
/// infinite or flat everywhere on the grid.
inline double estimate_budget_slope(const Criterion& f, const Vector& t, const Caps& caps, int k,
                                    int points = 16) {
  double prev_s = 0.0;
  double prev_g = budget_objective(f, t, caps, 0.0);
  double slope = 0.0;
  for (int i = 1; i < points; ++i) {
    const double s = static_cast<double>(k) * i / (points - 1);
    const double g = budget_objective(f, t, caps, s);
    if (std::isfinite(g) && std::isfinite(prev_g)) {
      slope = std::max(slope, std::abs(g - prev_g) / (s - prev_s));
    }
    prev_s = s;
    prev_g = g;
  }
  return slope;
}

/// Budget tolerance for an epsilon-optimal design: tol / max(L, slope, 1).
inline double budget_tolerance(const Criterion& f, const Vector& t, const Caps& caps, int k,
                               double tol) {
  double scale = 1.0;
  if (f.lipschitz_hint) scale = std::max(scale, *f.lipschitz_hint);
  scale = std::max(scale, estimate_budget_slope(f, t, caps, k));
  return tol / scale;
}

inline DesignResult optimal_design(const SymMatrix& a, int k, const Criterion& f,
                                   double tol = 1e-9) {
  if (k < 1) throw Error(ErrorCode::BadRange, "k must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::BadRange, "tol must be positive");

  const Spectrum spec = eigh_ascending(a);
  const Caps caps = weyl_caps(spec.t, k);
  if (f.requires_positive) {
    const auto feas = feasibility(spec.t, k, true);
    if (!feas) throw Error(ErrorCode::InfeasibleBudget, feas.message);
  }

  DesignResult out;
  out.budget_tol = f.monotone_nonincreasing ? 0.0 : budget_tolerance(f, spec.t, caps, k, tol);
  const auto search =
      optimize_budget(f, spec.t, caps, k, f.monotone_nonincreasing ? 1.0 : out.budget_tol);
  const Allocation alloc = allocate(spec.t, caps, search.s_star);
  const DesignVectors z = factor_diagonal(alloc.beta_compact, k);

  out.X = spec.Q * z.Z;
  out.s_star = search.s_star;
  out.lower_bound = search.value;
  out.eigenvalues_before = spec.t;
  out.beta_compact = alloc.beta_compact;
  out.eigenvalues_after =
      eigenvalues_ascending(SymMatrix(a.matrix() + out.X * out.X.transpose()));
  out.objective = f(out.eigenvalues_after);
  return out;
}

/// Optimal value of the eigenvalue relaxation, f(t + beta(s*)); +inf when the
/// criterion cannot be made finite with k vectors.
inline double relaxation_value(const SymMatrix& a, int k, const Criterion& f, double tol = 1e-9) {
  const Spectrum spec = eigh_ascending(a);
  const Caps caps = weyl_caps(spec.t, k);
  if (f.requires_positive && !feasibility(spec.t, k, true)) return kInf;
  const double tol_s =
      f.monotone_nonincreasing ? 1.0 : budget_tolerance(f, spec.t, caps, k, tol);
  return optimize_budget(f, spec.t, caps, k, tol_s).value;
}

/// d x k matrix with columns uniform on the unit ball.
template <typename Rng>
Matrix random_ball_design(int d, int k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix x(d, k);
  for (int i = 0; i < k; ++i) {
    Vector dir(d);
    double nrm = 0.0;
    do {
      for (int r = 0; r < d; ++r) dir(r) = normal(rng);
      nrm = dir.norm();
    } while (nrm == 0.0);
    const double radius = std::pow(unif(rng), 1.0 / d);
    x.col(i) = dir * (radius / nrm);
  }
  return x;
}

inline double design_objective(const SymMatrix& a, const Matrix& x, const Criterion& f) {
  return f(eigenvalues_ascending(SymMatrix(a.matrix() + x * x.transpose())));
}

inline VerifyReport verify_design(const SymMatrix& a, const Matrix& x, const Criterion& f,
                                  long samples, std::uint64_t seed = 0) {
  const int d = a.dim();
  if (x.rows() != d) {
    throw Error(ErrorCode::DimensionMismatch, "design has " + std::to_string(x.rows()) +
                                                  " rows, prior has dimension " + std::to_string(d));
  }
  if (x.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "design has no columns");
  const int k = static_cast<int>(x.cols());
  const int dhat = std::min(d, k);

  VerifyReport rep;
  rep.unit_ball_ok = true;
  for (int i = 0; i < k; ++i) {
    if (x.col(i).squaredNorm() > 1.0 + 1e-10) rep.unit_ball_ok = false;
  }

  const Vector t = eigh_ascending(a).t;
  const SymMatrix updated(a.matrix() + x * x.transpose());
  const Vector lambda = eigenvalues_ascending(updated);
  const double slack = 1e-8 * std::max(1.0, max_abs(updated.matrix()));
  rep.weyl_ok = true;
  for (int j = 0; j < d; ++j) {
    if (t(j) > lambda(j) + slack) rep.weyl_ok = false;
    if (j + dhat < d && lambda(j) > t(j + dhat) + slack) rep.weyl_ok = false;
  }

  rep.objective = f(lambda);
  rep.lower_bound = relaxation_value(a, k, f);
  if (std::isinf(rep.objective) && std::isinf(rep.lower_bound)) {
    rep.bound_gap = 0.0;
  } else {
    rep.bound_gap = rep.objective - rep.lower_bound;
  }

  std::mt19937_64 rng(seed);
  for (long i = 0; i < samples; ++i) {
    const Matrix z = random_ball_design(d, k, rng);
    if (design_objective(a, z, f) < rep.objective - 1e-9) ++rep.sampled_better_designs;
  }
  return rep;
}

/// True when x is majorized by y: equal totals and every descending prefix
/// sum of x at most the matching prefix sum of y.
inline bool majorizes(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "majorizes needs vectors of equal length");
  }
  const Eigen::Index d = x.size();
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());

  const double scale = std::max({1.0, x.cwiseAbs().sum(), y.cwiseAbs().sum()});
  const double tol = 1e-10 * scale;
  double px = 0.0;
  double py = 0.0;
  for (Eigen::Index m = 0; m < d; ++m) {
    px += xs[m];
    py += ys[m];
    if (m + 1 < d && px > py + tol) return false;
  }
  return std::abs(px - py) <= tol;
}

}  // namespace specdesign
