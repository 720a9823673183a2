// Command-line front end: design, demo2d, verify, dfo-bench.

#include <CLI11.hpp>

#include <iostream>

#include "specdesign/cli.hpp"

namespace cli = specdesign::cli;

int main(int argc, char** argv) {
  CLI::App app{"Optimal spectral experimental designs with a PSD prior"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Random seed (SPECTRAL_DESIGN_SEED overrides)")->default_val(0);

  cli::DesignOptions design;
  auto* design_cmd = app.add_subcommand("design", "Compute an optimal design for a prior matrix");
  design_cmd->add_option("--input", design.input, "Prior matrix, CSV (d lines of d numbers)")->required();
  design_cmd->add_option("--k", design.k, "Number of design vectors")->required();
  design_cmd->add_option("--criterion", design.criterion,
                         "a-opt | d-opt | e-opt | custom:<file.json>\n"
                         "custom files: {\"name\":..., \"kind\":\"power-sum\", \"exponent\":p} giving\n"
                         "  sum l^p for p < 0 or p >= 1, and -sum l^p for 0 < p < 1")
      ->required();
  design_cmd->add_option("--tol", design.tol, "Objective tolerance for non-monotone criteria")
      ->default_val(1e-9);
  design_cmd->add_option("--output", design.output, "Design document (JSON)")->required();

  cli::Demo2dOptions demo;
  auto* demo_cmd = app.add_subcommand("demo2d", "Two-dimensional design figure (SVG + CSV)");
  demo_cmd->add_option("--prior", demo.prior, "Prior points \"a,b;c,d;...\" (may be empty)")
      ->default_val("");
  demo_cmd->add_option("--k", demo.k, "Number of design vectors")->required();
  demo_cmd->add_option("--svg", demo.svg, "SVG output path");
  demo_cmd->add_option("--csv", demo.csv, "CSV output path (x,y,multiplicity)");
  demo_cmd->add_option("--criterion", demo.criterion, "Criterion name")->default_val("d-opt");

  cli::VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a design against the optimality certificate");
  verify_cmd->add_option("--input", verify.input, "Prior matrix, CSV")->required();
  verify_cmd->add_option("--design", verify.design, "Design document (JSON)")->required();
  verify_cmd->add_option("--criterion", verify.criterion, "Criterion name")->required();
  verify_cmd->add_option("--samples", verify.samples, "Random competing designs")->default_val(10000);

  cli::DfoBenchOptions bench;
  auto* bench_cmd = app.add_subcommand("dfo-bench", "Noisy DFO benchmark with data profiles");
  bench_cmd->add_option("--sigma", bench.sigma, "Noise width (uniform on [-sigma/2, sigma/2])")
      ->default_val(1e-2);
  bench_cmd->add_option("--tau", bench.tau, "Accuracy level in (0, 1)")->default_val(1e-1);
  bench_cmd->add_option("--seeds", bench.seeds, "Seeds per problem")->default_val(10);
  bench_cmd->add_option("--budget-multiplier", bench.budget_multiplier, "Budget in units of d + 1")
      ->default_val(50);
  bench_cmd->add_option("--modes", bench.modes, "Comma-separated: spectral,coordinate,forward-diff")
      ->default_val("spectral,coordinate,forward-diff");
  bench_cmd->add_option("--dims", bench.dims, "Comma-separated problem dimensions")->default_val("2,4,8");
  bench_cmd->add_option("--problems", bench.problems,
                        "Comma-separated subset of sphere,rosenbrock,ill-quadratic,trigonometric,"
                        "cubic-quadratic");
  bench_cmd->add_option("--reuse-radius", bench.reuse_radius, "Reuse radius multiplier r")->default_val(100.0);
  bench_cmd->add_option("--out", bench.out, "Data-profile CSV (method,alpha,fraction_solved)")->required();
  bench_cmd->add_option("--runs-out", bench.runs_out, "Per-run CSV (default: <out>_runs.csv)");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: all cores)")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kIoError;
  }

  seed = cli::resolve_seed(seed);
  if (*design_cmd) return cli::cmd_design(design, std::cout, std::cerr);
  if (*demo_cmd) return cli::cmd_demo2d(demo, std::cout, std::cerr);
  if (*verify_cmd) {
    verify.seed = seed;
    return cli::cmd_verify(verify, std::cout, std::cerr);
  }
  if (*bench_cmd) {
    bench.seed = seed;
    return cli::cmd_dfo_bench(bench, std::cout, std::cerr);
  }
  return cli::kIoError;
}
