#pragma once

// Regression-based derivative-free descent on a noisy oracle.
//
// Each iteration recycles stored evaluations that fall inside the reuse ball
// of radius r * delta around the incumbent, picks k new directions (spectral
// E-optimal design against the reused information U U^T, leading identity
// columns, or plain forward differences), fits a linear model by least
// squares and takes a backtracking step on the noisy values. True objective
// values are only used for bookkeeping of the best value seen.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "specdesign/criteria.hpp"
#include "specdesign/designer.hpp"
#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"
#include "specdesign/waterfill.hpp"

namespace specdesign::dfo {

enum class DesignMode { Spectral, Coordinate, ForwardDiff };

inline const char* to_string(DesignMode mode) {
  switch (mode) {
    case DesignMode::Spectral: return "spectral";
    case DesignMode::Coordinate: return "coordinate";
    case DesignMode::ForwardDiff: return "forward-diff";
  }
  return "unknown";
}

inline DesignMode parse_design_mode(const std::string& name) {
  if (name == "spectral") return DesignMode::Spectral;
  if (name == "coordinate") return DesignMode::Coordinate;
  if (name == "forward-diff") return DesignMode::ForwardDiff;
  throw Error(ErrorCode::InvalidArgument, "unknown design mode '" + name + "'");
}

struct DfoConfig {
  double eps_abs = 1e-2;
  double lip_grad = 1.0;
  double reuse_radius = 100.0;
  int budget_multiplier = 50;
  DesignMode design_mode = DesignMode::Spectral;

  void validate() const {
    if (!(eps_abs > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_abs must be > 0");
    if (!(lip_grad > 0.0)) throw Error(ErrorCode::InvalidArgument, "lip_grad must be > 0");
    if (!(reuse_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "reuse_radius must be > 0");
    if (budget_multiplier < 1) throw Error(ErrorCode::InvalidArgument, "budget_multiplier must be >= 1");
  }
};

// Counter-based uniform stream: the value depends only on (stream, seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline double counter_uniform(std::uint64_t stream, std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(stream) ^ seed) ^ index);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline std::uint64_t stream_key(const std::string& name, int dim) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return splitmix64(h ^ static_cast<std::uint64_t>(dim));
}

/// g(y) + xi with xi ~ U[-sigma/2, sigma/2], independent across calls.
class NoisyOracle {
 public:
  using Function = std::function<double(const Vector&)>;

  NoisyOracle(Function g, double sigma, std::uint64_t seed, std::uint64_t stream = 0)
      : g_(std::move(g)), sigma_(sigma), seed_(seed), stream_(stream) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  }

  double operator()(const Vector& y) {
    const double truth = g_(y);
    best_ = std::min(best_, truth);
    best_history_.push_back(best_);
    const double xi = sigma_ * (counter_uniform(stream_, seed_, calls_) - 0.5);
    ++calls_;
    return truth + xi;
  }

  double true_value(const Vector& y) const { return g_(y); }
  double sigma() const { return sigma_; }
  long calls() const { return calls_; }
  const std::vector<double>& best_true_history() const { return best_history_; }

 private:
  Function g_;
  double sigma_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  long calls_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_history_;
};

struct GradientEstimate {
  Vector gradient;
  bool rank_deficient = false;
};

/// Least-squares slope fit: argmin_g sum_i (delta dir_i^T g - [value_i - center])^2.
/// Solved through the eigendecomposition of dirs dirs^T; eigenvalues below
/// 1e-12 * max(1, lambda_max) are dropped, which yields the minimum-norm
/// solution and sets rank_deficient.
inline GradientEstimate ls_gradient(double center_value, const Matrix& dirs, const Vector& values,
                                    double delta) {
  if (dirs.cols() < 1) throw Error(ErrorCode::InvalidArgument, "need at least one direction");
  if (dirs.cols() != values.size()) {
    throw Error(ErrorCode::LengthMismatch, "one value per direction required");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");

  const Vector rhs = dirs * ((values.array() - center_value).matrix() / delta);
  const Spectrum spec = eigh_ascending(gram(dirs));
  const Eigen::Index d = dirs.rows();
  const double floor = 1e-12 * std::max(1.0, spec.t(d - 1));

  GradientEstimate out{Vector::Zero(d), false};
  for (Eigen::Index j = 0; j < d; ++j) {
    if (spec.t(j) <= floor) {
      out.rank_deficient = true;
      continue;
    }
    out.gradient += spec.Q.col(j) * (spec.Q.col(j).dot(rhs) / spec.t(j));
  }
  return out;
}

/// Radius minimizing the least-squares gradient error bound:
///   sqrt(2 eps / L) * ((q + k) / (q r^4 + k))^(1/4).
inline double optimal_radius(const DfoConfig& cfg, int q, int k) {
  if (q < 0 || k < 1) throw Error(ErrorCode::BadRange, "need q >= 0 and k >= 1");
  const double r4 = std::pow(cfg.reuse_radius, 4);
  return std::sqrt(2.0 * cfg.eps_abs / cfg.lip_grad) *
         std::pow((q + k) / (q * r4 + k), 0.25);
}

/// Right-hand side of the gradient error bound for given radius; lambda_min is
/// the smallest eigenvalue of U U^T + X X^T.
inline double gradient_error_bound(const DfoConfig& cfg, double lambda_min, int q, int k,
                                   double delta) {
  const double r2 = cfg.reuse_radius * cfg.reuse_radius;
  const double reused = cfg.lip_grad * r2 * delta / 2.0 + cfg.eps_abs / delta;
  const double fresh = cfg.lip_grad * delta / 2.0 + cfg.eps_abs / delta;
  return std::sqrt(1.0 / lambda_min) * std::sqrt(q * reused * reused + k * fresh * fresh);
}

struct Evaluation {
  Vector point;
  double value = 0.0;
};

struct ReusedDirections {
  Matrix U;  // d x q, columns (p - y) / delta
  Vector values;
};

/// Stored evaluations with 0 < ||p - y|| <= r * delta, as normalized displacements.
inline ReusedDirections reuse_directions(const std::vector<Evaluation>& history, const Vector& y,
                                         double delta, double r) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  std::vector<const Evaluation*> picked;
  const double radius = r * delta;
  for (const auto& e : history) {
    const double dist = (e.point - y).norm();
    if (dist > 0.0 && dist <= radius) picked.push_back(&e);
  }
  ReusedDirections out{Matrix(y.size(), static_cast<Eigen::Index>(picked.size())),
                       Vector(static_cast<Eigen::Index>(picked.size()))};
  for (std::size_t j = 0; j < picked.size(); ++j) {
    out.U.col(static_cast<Eigen::Index>(j)) = (picked[j]->point - y) / delta;
    out.values(static_cast<Eigen::Index>(j)) = picked[j]->value;
  }
  return out;
}

/// max{1, floor(d/2), d - rank(U)}
inline int new_direction_count(int d, int rank_u) {
  if (rank_u < 0 || rank_u > d) throw Error(ErrorCode::BadRange, "rank must lie in [0, d]");
  return std::max({1, d / 2, d - rank_u});
}

struct DfoRun {
  std::vector<double> best_true_history;  // one entry per oracle call
  long calls_used = 0;
  Vector final_point;
  int iterations = 0;
};

inline long dfo_budget(int d, const DfoConfig& cfg) {
  return static_cast<long>(cfg.budget_multiplier) * (d + 1);
}

inline DfoRun dfo_minimize(NoisyOracle& oracle, const Vector& x0, const DfoConfig& cfg) {
  cfg.validate();
  const int d = static_cast<int>(x0.size());
  if (d < 1) throw Error(ErrorCode::DimensionZero, "starting point is empty");
  const long budget = dfo_budget(d, cfg);
  if (budget < d + 2) {
    throw Error(ErrorCode::BudgetTooSmall,
                "budget " + std::to_string(budget) + " < d + 2 = " + std::to_string(d + 2));
  }
  constexpr int kMaxHalvings = 20;
  const long start_calls = oracle.calls();
  auto used = [&] { return oracle.calls() - start_calls; };

  std::vector<Evaluation> history;
  Vector y = x0;
  double fy = oracle(y);
  history.push_back({y, fy});
  double delta = optimal_radius(cfg, 0, d);
  const Criterion e_opt = criteria::e_optimal();

  DfoRun run;
  while (used() < budget) {
    ++run.iterations;
    Matrix reused_dirs(d, 0);
    Vector reused_values(0);
    Matrix fresh;
    if (cfg.design_mode == DesignMode::ForwardDiff) {
      fresh = Matrix::Identity(d, d);
    } else {
      auto reuse = reuse_directions(history, y, delta, cfg.reuse_radius);
      const SymMatrix prior = gram(reuse.U);
      const int rank = support_size(eigenvalues_ascending(prior).cwiseMax(0.0));
      const int k = new_direction_count(d, rank);
      if (cfg.design_mode == DesignMode::Spectral) {
        fresh = optimal_design(prior, k, e_opt).X;
      } else {
        fresh = Matrix::Identity(d, d).leftCols(k);
      }
      reused_dirs = std::move(reuse.U);
      reused_values = std::move(reuse.values);
    }

    const Eigen::Index q = reused_dirs.cols();
    const Eigen::Index k = fresh.cols();
    Matrix dirs(d, q + k);
    Vector values(q + k);
    dirs << reused_dirs, fresh;
    values.head(q) = reused_values;
    bool exhausted = false;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (used() >= budget) {
        exhausted = true;
        break;
      }
      const Vector p = y + delta * fresh.col(i);
      values(q + i) = oracle(p);
      history.push_back({p, values(q + i)});
    }
    if (exhausted) break;

    const Vector grad = ls_gradient(fy, dirs, values, delta).gradient;

    double step = 1.0 / cfg.lip_grad;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings && used() < budget; ++h) {
      const Vector trial = y - step * grad;
      const double ft = oracle(trial);
      history.push_back({trial, ft});
      if (ft < fy) {
        y = trial;
        fy = ft;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) delta /= 2.0;
  }

  const auto& best = oracle.best_true_history();
  run.best_true_history.assign(best.end() - used(), best.end());
  run.calls_used = used();
  run.final_point = y;
  return run;
}

// ---------------------------------------------------------------------------
// Data profiles

struct RunRecord {
  std::string problem;
  int dim = 0;
  std::uint64_t seed = 0;
  std::string method;
  double f0 = 0.0;                  // true value at the starting point
  std::vector<double> history;      // best true value after each call
};

struct ProfileCurve {
  std::string method;
  std::vector<double> alpha;
  std::vector<double> fraction;
};

/// alpha_i = max_alpha * i / (points - 1), i = 0..points-1.
inline std::vector<double> alpha_grid(double max_alpha, int points = 200) {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = max_alpha * i / (points - 1);
  return out;
}

/// Fraction of (problem, dim, seed) instances each method solves within
/// alpha (d + 1) calls, where solving means
///   best true value <= tau g(x0) + (1 - tau) g*,
/// g* being the best final value of any method on the instance. An instance
/// whose starting value already meets the target counts as solved at 0 calls.
inline std::vector<ProfileCurve> data_profile(const std::vector<RunRecord>& runs, double tau,
                                              const std::vector<double>& alphas) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::BadRange, "tau must lie in (0, 1)");
  using Key = std::tuple<std::string, int, std::uint64_t>;

  std::map<std::string, std::map<Key, const RunRecord*>> by_method;
  for (const auto& r : runs) {
    auto& slot = by_method[r.method][Key{r.problem, r.dim, r.seed}];
    if (slot) throw Error(ErrorCode::GridMismatch, "duplicate run for method " + r.method);
    slot = &r;
  }
  if (by_method.empty()) return {};

  const auto& reference = by_method.begin()->second;
  for (const auto& [method, inst] : by_method) {
    if (inst.size() != reference.size() ||
        !std::equal(inst.begin(), inst.end(), reference.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw Error(ErrorCode::GridMismatch, "method " + method + " ran a different instance set");
    }
  }

  std::map<Key, double> g_star;
  for (const auto& [method, inst] : by_method) {
    for (const auto& [key, rec] : inst) {
      const double final_value = rec->history.empty() ? rec->f0 : rec->history.back();
      auto it = g_star.find(key);
      if (it == g_star.end()) {
        g_star.emplace(key, final_value);
      } else {
        it->second = std::min(it->second, final_value);
      }
    }
  }

  std::vector<ProfileCurve> curves;
  const double n = static_cast<double>(reference.size());
  for (const auto& [method, inst] : by_method) {
    std::vector<std::pair<long, int>> solve_times;  // (calls, dim), calls < 0 when unsolved
    for (const auto& [key, rec] : inst) {
      const double target = tau * rec->f0 + (1.0 - tau) * g_star.at(key);
      long when = -1;
      if (rec->f0 <= target) {
        when = 0;
      } else {
        for (std::size_t i = 0; i < rec->history.size(); ++i) {
          if (rec->history[i] <= target) {
            when = static_cast<long>(i) + 1;
            break;
          }
        }
      }
      solve_times.emplace_back(when, rec->dim);
    }
    ProfileCurve curve{method, alphas, std::vector<double>(alphas.size(), 0.0)};
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      int solved = 0;
      for (const auto& [when, dim] : solve_times) {
        if (when >= 0 && static_cast<double>(when) <= alphas[a] * (dim + 1) + 1e-9) ++solved;
      }
      curve.fraction[a] = solved / n;
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace specdesign::dfo
