#pragma once

// Water filling over Weyl capacities.
//
// Bucket j starts at level t_j (ascending eigenvalues of the prior) and may be
// raised up to its capacity u_j = t_{j+dhat}, dhat = min(d, k); the last dhat
// buckets are uncapped. Pouring s units in lockstep into the lowest buckets
// gives the water level c(s) and increments beta(s). The compact rewrite
// beta'(s) puts the same multiset of final levels on the first dhat
// coordinates only, so diag(beta') has rank <= k.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"

namespace specdesign {

/// Capacity of one bucket: either a finite level or unbounded. Kept as a tagged
/// value so no arithmetic ever touches an infinity.
class Capacity {
 public:
  static Capacity unbounded() { return Capacity(); }
  static Capacity at(double level) { return Capacity(level); }

  bool is_unbounded() const { return !level_.has_value(); }
  bool is_finite() const { return level_.has_value(); }
  double value() const { return *level_; }

  /// Room left above `floor`, or nullopt when unbounded.
  std::optional<double> headroom(double floor) const {
    if (!level_) return std::nullopt;
    return *level_ - floor;
  }

  friend bool operator==(const Capacity& a, const Capacity& b) { return a.level_ == b.level_; }

 private:
  Capacity() = default;
  explicit Capacity(double level) : level_(level) {}
  std::optional<double> level_;
};

struct Caps {
  std::vector<Capacity> u;
  int dhat = 0;
  int k = 0;
};

struct Allocation {
  double s = 0.0;      // budget used
  double level = 0.0;  // water level c(s)
  Vector beta;
  Vector beta_compact;
};

inline Caps weyl_caps(const Vector& t, int k) {
  if (k < 1) throw Error(ErrorCode::BadRange, "budget k must be >= 1");
  const int d = static_cast<int>(t.size());
  if (d == 0) throw Error(ErrorCode::DimensionZero, "empty eigenvalue vector");
  Caps caps;
  caps.k = k;
  caps.dhat = std::min(d, k);
  caps.u.reserve(d);
  for (int j = 0; j < d; ++j) {
    if (j < d - caps.dhat) {
      caps.u.push_back(Capacity::at(t(j + caps.dhat)));
    } else {
      caps.u.push_back(Capacity::unbounded());
    }
  }
  return caps;
}

/// Amount of water needed to raise every bucket to level c, each truncated at
/// its capacity.
inline double fill_amount(const Vector& t, const Caps& caps, double c) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double rise = std::max(c - t(j), 0.0);
    const auto room = caps.u[j].headroom(t(j));
    total += room ? std::min(rise, *room) : rise;
  }
  return total;
}

/// c(s) = inf{c >= t_1 : fill_amount(c) >= s}, by an exact sweep over the
/// breakpoints of the piecewise-linear fill function.
inline double water_level(const Vector& t, const Caps& caps, double s) {
  if (t.size() == 0) throw Error(ErrorCode::DimensionZero, "empty eigenvalue vector");
  if (!(s >= 0.0)) throw Error(ErrorCode::BadRange, "budget s must be >= 0");
  if (s == 0.0) return t(0);

  // (position, slope change): +1 when a bucket starts filling, -1 when it caps.
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    events.emplace_back(t(j), +1);
    if (caps.u[j].is_finite()) events.emplace_back(caps.u[j].value(), -1);
  }
  std::sort(events.begin(), events.end());

  double level = t(0);
  double filled = 0.0;
  int slope = 0;
  for (const auto& [pos, delta] : events) {
    if (pos > level && slope > 0) {
      const double gain = slope * (pos - level);
      if (filled + gain >= s) return level + (s - filled) / slope;
      filled += gain;
      level = pos;
    }
    slope += delta;
  }
  // Past the last breakpoint only the dhat uncapped buckets are rising.
  return level + (s - filled) / slope;
}

/// beta'_j = (c - t_j)_+ on the first dhat coordinates, zero elsewhere.
inline Vector compact_allocation(const Vector& t, const Caps& caps, double c) {
  Vector out = Vector::Zero(t.size());
  for (int j = 0; j < caps.dhat; ++j) out(j) = std::max(c - t(j), 0.0);
  return out;
}

inline Allocation allocate(const Vector& t, const Caps& caps, double s) {
  if (s < 0.0 || s > caps.k) {
    throw Error(ErrorCode::BadRange, "budget s must lie in [0, k]");
  }
  const Eigen::Index d = t.size();
  double c = water_level(t, caps, s);

  // Buckets strictly between floor and cap share the level c. Fix the others
  // first and give the exact residual to the partial ones, so sum(beta) == s
  // does not drift at breakpoints.
  Vector beta(d);
  std::vector<Eigen::Index> partial;
  double fixed = 0.0;
  double partial_floor = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto room = caps.u[j].headroom(t(j));
    if (c <= t(j)) {
      beta(j) = 0.0;
    } else if (room && c >= caps.u[j].value()) {
      beta(j) = *room;
      fixed += beta(j);
    } else {
      partial.push_back(j);
      partial_floor += t(j);
    }
  }
  if (!partial.empty()) {
    const double residual = s - fixed;
    const double adjusted = (residual + partial_floor) / static_cast<double>(partial.size());
    // Only accept the adjusted level when it stays inside every partial bucket.
    bool inside = true;
    for (auto j : partial) {
      const auto room = caps.u[j].headroom(t(j));
      if (adjusted < t(j) || (room && adjusted > caps.u[j].value())) inside = false;
    }
    if (inside) c = adjusted;
    for (auto j : partial) {
      const auto room = caps.u[j].headroom(t(j));
      double b = std::max(c - t(j), 0.0);
      if (room) b = std::min(b, *room);
      beta(j) = b;
    }
  }

  Allocation out;
  out.s = s;
  out.level = c;
  out.beta = std::move(beta);
  out.beta_compact = compact_allocation(t, caps, c);
  return out;
}

struct Feasibility {
  bool ok = true;
  int zero_count = 0;  // d - ||t||_0
  std::string message;

  explicit operator bool() const { return ok; }
};

inline double support_tolerance(const Vector& t) {
  return 1e-10 * std::max(1.0, t.size() ? t(t.size() - 1) : 0.0);
}

/// Number of eigenvalues above the support tolerance.
inline int support_size(const Vector& t) {
  const double tol = support_tolerance(t);
  int n = 0;
  for (Eigen::Index j = 0; j < t.size(); ++j) n += t(j) > tol ? 1 : 0;
  return n;
}

/// A criterion that is +inf off the positive orthant has a finite optimum iff
/// k >= d - ||t||_0; otherwise every design leaves A + XX^T singular.
inline Feasibility feasibility(const Vector& t, int k, bool requires_positive) {
  Feasibility out;
  const int d = static_cast<int>(t.size());
  out.zero_count = d - support_size(t);
  if (!requires_positive) return out;
  if (k < out.zero_count) {
    out.ok = false;
    out.message = "infeasible: criterion requires a positive definite result, which needs k >= d - ||t||_0 = " +
                  std::to_string(out.zero_count) + " but k = " + std::to_string(k);
  }
  return out;
}

}  // namespace specdesign
