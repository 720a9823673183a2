#pragma once

// Small dense symmetric kernel: cyclic Jacobi eigensolver, Gram products and
// the handful of norms the rest of the library needs. Dimensions are expected
// to stay at desk scale (d up to a few hundred).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "specdesign/error.hpp"

namespace specdesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Square symmetric matrix. Construction symmetrizes the input as (S + S^T)/2,
/// so entries(i, j) == entries(j, i) holds bit-for-bit afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& s) {
    if (s.rows() != s.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
    }
    if (s.rows() == 0) {
      throw Error(ErrorCode::DimensionZero, "symmetric matrix must have dimension >= 1");
    }
    entries_ = 0.5 * (s + s.transpose());
    // (a + b)/2 and (b + a)/2 agree in IEEE arithmetic, but copy the upper
    // triangle anyway so the invariant does not lean on the expression template.
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) entries_(j, i) = entries_(i, j);
    }
  }

  static SymMatrix zero(int d) { return SymMatrix(Matrix::Zero(d, d)); }
  static SymMatrix identity(int d) { return SymMatrix(Matrix::Identity(d, d)); }
  static SymMatrix diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// Ascending eigenvalues paired with the orthonormal eigenvector basis.
struct Spectrum {
  Vector t;  // t(0) <= t(1) <= ... <= t(d-1)
  Matrix Q;  // column j pairs with t(j)
};

namespace detail {

struct JacobiResult {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};

inline double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// Cyclic-by-row Jacobi. Stops once the off-diagonal Frobenius norm drops to
// 1e-12 * ||S||_F or after 100 sweeps.
inline JacobiResult jacobi_eigen(const Matrix& s) {
  constexpr int kMaxSweeps = 100;
  constexpr double kRelTol = 1e-12;

  const Eigen::Index n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::Identity(n, n);
  const double target = kRelTol * a.norm();

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double sn = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  return {a.diagonal(), v, sweep};
}

}  // namespace detail

/// Eigendecomposition S = Q diag(t) Q^T with t ascending.
///
/// Eigenvalues in [-1e-8 ||S||_max, 0) are treated as roundoff and clamped to
/// zero; anything more negative raises NotPSD.
inline Spectrum eigh_ascending(const SymMatrix& s) {
  const int d = s.dim();
  if (d == 0) throw Error(ErrorCode::DimensionZero, "eigh_ascending on empty matrix");

  auto raw = detail::jacobi_eigen(s.matrix());

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw.values(a) < raw.values(b); });

  Spectrum out{Vector(d), Matrix(d, d)};
  for (int j = 0; j < d; ++j) {
    out.t(j) = raw.values(order[j]);
    out.Q.col(j) = raw.vectors.col(order[j]);
  }

  const double clamp = 1e-8 * max_abs(s.matrix());
  if (out.t(0) < -clamp) {
    throw Error(ErrorCode::NotPSD, "matrix has eigenvalue " + std::to_string(out.t(0)) +
                                       " below the roundoff threshold " + std::to_string(-clamp));
  }
  for (int j = 0; j < d; ++j) out.t(j) = std::max(out.t(j), 0.0);
  return out;
}

/// Eigenvalues only, ascending, without the PSD check. Used when the caller
/// already knows the matrix is PSD up to roundoff and only wants the spectrum.
inline Vector eigenvalues_ascending(const SymMatrix& s) {
  auto raw = detail::jacobi_eigen(s.matrix());
  Vector values = raw.values;
  std::sort(values.begin(), values.end());
  return values;
}

/// X X^T for a d x k matrix.
inline SymMatrix gram(const Matrix& x) {
  if (x.rows() == 0) throw Error(ErrorCode::DimensionZero, "gram of a matrix with no rows");
  if (x.cols() == 0) return SymMatrix::zero(static_cast<int>(x.rows()));
  return SymMatrix(x * x.transpose());
}

/// Plane rotation acting on columns i and j of y from the right:
///   y_i <- c y_i + s y_j,  y_j <- -s y_i + c y_j.
/// Leaves y y^T unchanged.
inline void rotate_columns(Matrix& y, Eigen::Index i, Eigen::Index j, double c, double s) {
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const double yi = y(r, i);
    const double yj = y(r, j);
    y(r, i) = c * yi + s * yj;
    y(r, j) = -s * yi + c * yj;
  }
}

}  // namespace specdesign
