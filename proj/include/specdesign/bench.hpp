#pragma once

// Desk-scale DFO benchmark: five smooth test functions at a few dimensions,
// run under every design mode and seed, feeding data profiles.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "specdesign/dfo.hpp"
#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"

namespace specdesign::dfo {

struct Problem {
  std::string name;
  int dim = 0;
  NoisyOracle::Function g;
  Vector x0;
  double lip_grad = 1.0;  // rough gradient-Lipschitz hint near x0
};

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"sphere", "rosenbrock", "ill-quadratic",
                                                 "trigonometric", "cubic-quadratic"};
  return names;
}

inline Problem make_problem(const std::string& name, int d) {
  if (d < 1) throw Error(ErrorCode::BadRange, "problem dimension must be >= 1");
  Problem p;
  p.name = name;
  p.dim = d;
  if (name == "sphere") {
    p.g = [](const Vector& y) { return y.squaredNorm(); };
    p.x0 = Vector::Ones(d);
    p.lip_grad = 2.0;
  } else if (name == "rosenbrock") {
    p.g = [](const Vector& y) {
      if (y.size() == 1) return (1.0 - y(0)) * (1.0 - y(0));
      double acc = 0.0;
      for (Eigen::Index i = 0; i + 1 < y.size(); ++i) {
        const double a = y(i + 1) - y(i) * y(i);
        const double b = 1.0 - y(i);
        acc += 100.0 * a * a + b * b;
      }
      return acc;
    };
    p.x0 = Vector(d);
    for (int i = 0; i < d; ++i) p.x0(i) = i % 2 == 0 ? -1.2 : 1.0;
    p.lip_grad = 1000.0;
  } else if (name == "ill-quadratic") {
    // condition number 1e4
    Vector curv(d);
    for (int i = 0; i < d; ++i) curv(i) = d == 1 ? 1.0 : std::pow(10.0, 4.0 * i / (d - 1));
    p.g = [curv](const Vector& y) { return 0.5 * (curv.array() * y.array().square()).sum(); };
    p.x0 = Vector::Ones(d);
    p.lip_grad = curv.maxCoeff();
  } else if (name == "trigonometric") {
    p.g = [](const Vector& y) {
      const Eigen::Index n = y.size();
      const double cos_sum = y.array().cos().sum();
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double fi = static_cast<double>(n) - cos_sum +
                          static_cast<double>(i + 1) * (1.0 - std::cos(y(i))) - std::sin(y(i));
        acc += fi * fi;
      }
      return acc;
    };
    p.x0 = Vector::Constant(d, 1.0 / d);
    p.lip_grad = 2.0 * d * d;
  } else if (name == "cubic-quadratic") {
    // 0.5 |y|^2 - sum y + |y|^3 / 3
    p.g = [](const Vector& y) {
      const double r = y.norm();
      return 0.5 * r * r - y.sum() + r * r * r / 3.0;
    };
    p.x0 = Vector::Constant(d, 2.0);
    p.lip_grad = 1.0 + 2.0 * p.x0.norm();
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown problem '" + name + "'");
  }
  return p;
}

struct BenchConfig {
  double sigma = 1e-2;
  int seeds = 10;
  int budget_multiplier = 50;
  double reuse_radius = 100.0;
  std::vector<DesignMode> modes = {DesignMode::Spectral, DesignMode::Coordinate,
                                   DesignMode::ForwardDiff};
  std::vector<int> dims = {2, 4, 8};
  std::vector<std::string> problems = problem_names();
  std::uint64_t base_seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Configuration for one run: eps_abs = sigma (floored for the noiseless case)
/// and the problem's own Lipschitz hint.
inline DfoConfig run_config(const Problem& p, const BenchConfig& bench, DesignMode mode) {
  DfoConfig cfg;
  cfg.eps_abs = std::max(bench.sigma, 1e-10);
  cfg.lip_grad = p.lip_grad;
  cfg.reuse_radius = bench.reuse_radius;
  cfg.budget_multiplier = bench.budget_multiplier;
  cfg.design_mode = mode;
  return cfg;
}

inline RunRecord run_single(const Problem& p, std::uint64_t seed, DesignMode mode,
                            const BenchConfig& bench) {
  NoisyOracle oracle(p.g, bench.sigma, seed, stream_key(p.name, p.dim));
  const DfoRun run = dfo_minimize(oracle, p.x0, run_config(p, bench, mode));
  return {p.name, p.dim, seed, to_string(mode), p.g(p.x0), run.best_true_history};
}

/// Every (problem, dim, seed, mode) combination. Runs are independent and are
/// spread over worker threads; the output order is deterministic.
inline std::vector<RunRecord> run_benchmark(const BenchConfig& bench) {
  if (bench.seeds < 1) throw Error(ErrorCode::BadRange, "seeds must be >= 1");
  struct Job {
    Problem problem;
    std::uint64_t seed;
    DesignMode mode;
  };
  std::vector<Job> jobs;
  for (const auto& name : bench.problems) {
    for (int d : bench.dims) {
      const Problem p = make_problem(name, d);
      for (int s = 0; s < bench.seeds; ++s) {
        for (DesignMode mode : bench.modes) {
          jobs.push_back({p, bench.base_seed + static_cast<std::uint64_t>(s), mode});
        }
      }
    }
  }

  std::vector<RunRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = run_single(jobs[i].problem, jobs[i].seed, jobs[i].mode, bench);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned n = bench.threads ? bench.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace specdesign::dfo
