#pragma once

// Factor a diagonal target diag(beta') with trace <= k and rank <= k into k
// design vectors in the unit ball, plus the closed-form isotropic designs.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"

namespace specdesign {

struct DesignVectors {
  Matrix Z;        // d x k, one design vector per column
  double s = 0.0;  // sum of squared column norms
};

struct EqualizeResult {
  Matrix Y;
  int rotations = 0;
};

/// Right-multiplies Y by plane rotations until every column has squared norm
/// (sum_i ||y_i||^2) / k. Y Y^T is unchanged. Each rotation pins one column at
/// the target, so at most k - 1 rotations are applied.
inline EqualizeResult equalize_column_norms_counted(Matrix y) {
  const Eigen::Index k = y.cols();
  EqualizeResult out{std::move(y), 0};
  if (k <= 1) return out;
  Matrix& m = out.Y;

  std::vector<double> norms(k);
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    norms[i] = m.col(i).squaredNorm();
    total += norms[i];
  }
  const double target = total / static_cast<double>(k);
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(total, 1e-300);

  std::vector<bool> pinned(k, false);
  for (Eigen::Index round = 0; round + 1 < k; ++round) {
    Eigen::Index lo = -1;
    Eigen::Index hi = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (pinned[i]) continue;
      if (lo < 0 || norms[i] < norms[lo]) lo = i;
      if (hi < 0 || norms[i] > norms[hi]) hi = i;
    }
    if (target - norms[lo] <= tol && norms[hi] - target <= tol) break;

    // Pin whichever of the pair is closer to the target; the tangent of the
    // angle then stays small.
    Eigen::Index fix = lo;
    Eigen::Index partner = hi;
    if (norms[hi] - target < target - norms[lo]) std::swap(fix, partner);

    // ||c y_f + s y_p||^2 = target(c^2 + s^2)  <=>  a + b tan + e tan^2 = 0
    const double a = norms[fix] - target;
    const double e = norms[partner] - target;
    const double b = 2.0 * m.col(fix).dot(m.col(partner));
    const double disc = b * b - 4.0 * a * e;  // >= b^2 since a and e differ in sign
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    const double tan_theta = q == 0.0 ? 0.0 : a / q;  // the smaller-magnitude root
    const double c = 1.0 / std::hypot(1.0, tan_theta);
    const double s = tan_theta * c;

    rotate_columns(m, fix, partner, c, s);
    ++out.rotations;
    pinned[fix] = true;
    norms[partner] = norms[partner] + norms[fix] - target;
    norms[fix] = target;
  }
  return out;
}

inline Matrix equalize_column_norms(const Matrix& y) {
  return equalize_column_norms_counted(y).Y;
}

/// Z with Z Z^T = diag(beta_prime), k columns of equal squared norm sum/k.
inline DesignVectors factor_diagonal(const Vector& beta_prime, int k) {
  if (k < 1) throw Error(ErrorCode::BadRange, "k must be >= 1");
  const Eigen::Index d = beta_prime.size();
  if (d == 0) throw Error(ErrorCode::DimensionZero, "empty target diagonal");
  if ((beta_prime.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "target diagonal must be nonnegative");
  }

  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (beta_prime(j) > 0.0) support.push_back(j);
  }
  if (static_cast<Eigen::Index>(support.size()) > k) {
    throw Error(ErrorCode::RankBudgetExceeded, "support " + std::to_string(support.size()) +
                                                   " exceeds k = " + std::to_string(k));
  }
  const double total = beta_prime.sum();
  if (total > k * (1.0 + 1e-10)) {
    throw Error(ErrorCode::TraceBudgetExceeded,
                "trace " + std::to_string(total) + " exceeds k = " + std::to_string(k));
  }

  Matrix y = Matrix::Zero(d, k);
  for (std::size_t i = 0; i < support.size(); ++i) {
    y(support[i], static_cast<Eigen::Index>(i)) = std::sqrt(beta_prime(support[i]));
  }
  return {equalize_column_norms(y), total};
}

/// x^i = sqrt(s/k) e_i, i = 1..k. Requires k <= d.
inline DesignVectors isotropic_axis_design(double s, int k, int d) {
  if (k < 1 || d < 1) throw Error(ErrorCode::BadRange, "k and d must be >= 1");
  if (k > d) throw Error(ErrorCode::BadRange, "axis design needs k <= d");
  if (s < 0.0 || s > k) throw Error(ErrorCode::BadRange, "s must lie in [0, k]");
  Matrix z = Matrix::Zero(d, k);
  const double scale = std::sqrt(s / k);
  for (int i = 0; i < k; ++i) z(i, i) = scale;
  return {z, s};
}

/// Harmonic-frame design for k >= d + 1: column i samples
/// (sin m theta_i, cos m theta_i), m = 1..floor(d/2), at theta_i = 2 pi (i-1)/k,
/// with a leading sqrt(2)/2 entry for odd d. The k columns form a tight frame,
/// sum x x^T = (s/d) I.
inline DesignVectors isotropic_fourier_design(double s, int k, int d) {
  if (k < 1 || d < 1) throw Error(ErrorCode::BadRange, "k and d must be >= 1");
  if (k <= d) throw Error(ErrorCode::BadRange, "harmonic frame needs k >= d + 1");
  if (s < 0.0 || s > k) throw Error(ErrorCode::BadRange, "s must lie in [0, k]");
  Matrix z(d, k);
  const double scale = std::sqrt(2.0 * s / (static_cast<double>(d) * k));
  const bool odd = d % 2 == 1;
  for (int i = 0; i < k; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / k;
    int row = 0;
    if (odd) z(row++, i) = scale * std::numbers::sqrt2 / 2.0;
    for (int m = 1; m <= d / 2; ++m) {
      z(row++, i) = scale * std::sin(m * theta);
      z(row++, i) = scale * std::cos(m * theta);
    }
  }
  return {z, s};
}

}  // namespace specdesign
