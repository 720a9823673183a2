#pragma once

// Subcommands of the spectral-design tool. Each returns a process exit code:
//   0 success, 1 I/O or parse error, 2 infeasible budget, 3 certificate failure.

#include <fmt/format.h>

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specdesign/bench.hpp"
#include "specdesign/criteria.hpp"
#include "specdesign/designer.hpp"
#include "specdesign/dfo.hpp"
#include "specdesign/error.hpp"
#include "specdesign/io.hpp"

namespace specdesign::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kInfeasible = 2,
  kCertificateFailure = 3,
};

/// SPECTRAL_DESIGN_SEED, when set to an integer, wins over the flag value.
inline std::uint64_t resolve_seed(std::uint64_t flag_value) {
  if (const char* env = std::getenv("SPECTRAL_DESIGN_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return flag_value;
}

inline int report(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return e.code() == ErrorCode::InfeasibleBudget ? kInfeasible : kIoError;
}

struct DesignOptions {
  std::string input;
  int k = 1;
  std::string criterion = "d-opt";
  double tol = 1e-9;
  std::string output;
};

inline int cmd_design(const DesignOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.k < 1) throw Error(ErrorCode::BadRange, "--k must be >= 1");
    const SymMatrix a = io::read_matrix_csv(opt.input);
    const Criterion f = io::load_criterion(opt.criterion);
    const DesignResult r = optimal_design(a, opt.k, f, opt.tol);
    io::write_file(opt.output, io::serialize(io::make_document(r, opt.criterion)));
    out << fmt::format("d={} k={} criterion={} objective={:.12g} lower_bound={:.12g} s*={:.12g}\n",
                       a.dim(), opt.k, opt.criterion, r.objective, r.lower_bound, r.s_star);
    return kOk;
  } catch (const Error& e) {
    return report(e, err);
  }
}

struct Demo2dOptions {
  std::string prior;
  int k = 1;
  std::string svg;
  std::string csv;
  std::string criterion = "d-opt";
};

inline int cmd_demo2d(const Demo2dOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.k < 1) throw Error(ErrorCode::BadRange, "--k must be >= 1");
    const auto prior = io::parse_prior_points(opt.prior);
    Matrix a = Matrix::Zero(2, 2);
    for (const auto& p : prior) a += p * p.transpose();
    const SymMatrix prior_matrix(a);
    const Criterion f = io::load_criterion(opt.criterion);
    const DesignResult r = optimal_design(prior_matrix, opt.k, f);
    const auto sites = io::merge_points(r.X);
    if (!opt.csv.empty()) io::write_file(opt.csv, io::format_sites_csv(sites));
    if (!opt.svg.empty()) io::write_file(opt.svg, io::render_svg(prior, sites));
    const Matrix info = r.X * r.X.transpose();
    out << fmt::format("k={} sites={} objective={:.12g} lower_bound={:.12g}\n", opt.k, sites.size(),
                       r.objective, r.lower_bound);
    out << fmt::format("XX^T = [[{:.12g}, {:.12g}], [{:.12g}, {:.12g}]]\n", info(0, 0), info(0, 1),
                       info(1, 0), info(1, 1));
    return kOk;
  } catch (const Error& e) {
    return report(e, err);
  }
}

struct VerifyOptions {
  std::string input;
  std::string design;
  std::string criterion = "d-opt";
  long samples = 10000;
  std::uint64_t seed = 0;
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.samples < 0) throw Error(ErrorCode::BadRange, "--samples must be >= 0");
    const SymMatrix a = io::read_matrix_csv(opt.input);
    const io::DesignDocument doc = io::parse_design(io::read_file(opt.design));
    if (doc.d != a.dim()) {
      throw Error(ErrorCode::DimensionMismatch, fmt::format("design has d = {} but matrix has dimension {}",
                                                            doc.d, a.dim()));
    }
    const Criterion f = io::load_criterion(opt.criterion);
    const VerifyReport rep = verify_design(a, doc.X, f, opt.samples, opt.seed);
    out << fmt::format("weyl_ok={}\nunit_ball_ok={}\nobjective={:.12g}\nlower_bound={:.12g}\n"
                       "bound_gap={:.6g}\nsampled_better_designs={}\n",
                       rep.weyl_ok, rep.unit_ball_ok, rep.objective, rep.lower_bound, rep.bound_gap,
                       rep.sampled_better_designs);
    const bool ok = rep.weyl_ok && rep.unit_ball_ok && rep.bound_gap <= 1e-6 &&
                    rep.sampled_better_designs == 0;
    out << (ok ? "certificate: OK\n" : "certificate: FAILED\n");
    return ok ? kOk : kCertificateFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

struct DfoBenchOptions {
  double sigma = 1e-2;
  double tau = 1e-1;
  int seeds = 10;
  int budget_multiplier = 50;
  std::string modes = "spectral,coordinate,forward-diff";
  std::string dims = "2,4,8";
  std::string problems;  // empty: every built-in problem
  double reuse_radius = 100.0;
  std::string out;
  std::string runs_out;  // empty: derived from `out`
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

inline std::string default_runs_path(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + "_runs.csv";
  }
  return out + "_runs.csv";
}

inline std::string format_profiles_csv(const std::vector<dfo::ProfileCurve>& curves) {
  std::string csv = "method,alpha,fraction_solved\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.alpha.size(); ++i) {
      csv += fmt::format("{},{:.12g},{:.12g}\n", c.method, c.alpha[i], c.fraction[i]);
    }
  }
  return csv;
}

inline std::string format_runs_csv(const std::vector<dfo::RunRecord>& runs) {
  std::string csv = "problem,dim,seed,method,calls,best_true\n";
  for (const auto& r : runs) {
    const double best = r.history.empty() ? r.f0 : r.history.back();
    csv += fmt::format("{},{},{},{},{},{:.12g}\n", r.problem, r.dim, r.seed, r.method, r.history.size(), best);
  }
  return csv;
}

inline dfo::BenchConfig bench_config(const DfoBenchOptions& opt) {
  if (opt.seeds < 1) throw Error(ErrorCode::BadRange, "--seeds must be >= 1");
  if (!(opt.tau > 0.0 && opt.tau < 1.0)) throw Error(ErrorCode::BadRange, "--tau must lie in (0, 1)");
  if (!(opt.sigma >= 0.0)) throw Error(ErrorCode::BadRange, "--sigma must be >= 0");
  if (opt.budget_multiplier < 1) throw Error(ErrorCode::BadRange, "--budget-multiplier must be >= 1");
  if (!(opt.reuse_radius > 0.0)) throw Error(ErrorCode::BadRange, "--reuse-radius must be > 0");

  dfo::BenchConfig cfg;
  cfg.sigma = opt.sigma;
  cfg.seeds = opt.seeds;
  cfg.budget_multiplier = opt.budget_multiplier;
  cfg.reuse_radius = opt.reuse_radius;
  cfg.base_seed = opt.seed;
  cfg.threads = opt.threads;
  cfg.modes.clear();
  for (const auto& m : io::split(opt.modes, ',')) cfg.modes.push_back(dfo::parse_design_mode(io::trim(m)));
  if (cfg.modes.empty()) throw Error(ErrorCode::BadRange, "--modes must name at least one mode");
  cfg.dims.clear();
  for (const auto& d : io::split(opt.dims, ',')) {
    const double v = io::parse_double(d, "--dims");
    if (v < 1 || v != std::floor(v)) throw Error(ErrorCode::BadRange, "--dims entries must be positive integers");
    cfg.dims.push_back(static_cast<int>(v));
  }
  if (!opt.problems.empty()) {
    cfg.problems.clear();
    for (const auto& p : io::split(opt.problems, ',')) cfg.problems.push_back(io::trim(p));
  }
  return cfg;
}

inline int cmd_dfo_bench(const DfoBenchOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.out.empty()) throw Error(ErrorCode::Io, "--out is required");
    const dfo::BenchConfig cfg = bench_config(opt);
    const auto runs = dfo::run_benchmark(cfg);
    const auto curves = dfo::data_profile(runs, opt.tau, dfo::alpha_grid(cfg.budget_multiplier, 200));
    io::write_file(opt.out, format_profiles_csv(curves));
    io::write_file(opt.runs_out.empty() ? default_runs_path(opt.out) : opt.runs_out, format_runs_csv(runs));
    for (const auto& c : curves) {
      out << fmt::format("{:<14} final fraction solved {:.3f}\n", c.method, c.fraction.back());
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace specdesign::cli
