// sirajd: command-line driver for the sparse eigensolvers.
//
//   sirajd solve --matrix A.mtx --sigma-re 0 --sigma-im 0 --method sira --teps 1e-3 --out run/
//   sirajd verify --probes 500 --seed 1
//
// Exit codes: 0 success, 1 solver non-convergence (or failed checks), 2 configuration error.

#include <CLI11.hpp>

#include <iostream>

#include "sirajd/bench.hpp"
#include "sirajd/theory.hpp"

namespace {

constexpr int kConfigError = 2;

int run_solve(const sirajd::bench::ExperimentSpec& flags, const std::string& config_path, const CLI::App& cmd,
              bool quiet) {
  using namespace sirajd;
  bench::ExperimentSpec spec;
  try {
    if (!config_path.empty()) spec = bench::load_spec(config_path);
    // command-line flags override the file
    if (cmd.count("--matrix")) spec.matrix_path = flags.matrix_path;
    if (cmd.count("--sigma-re")) spec.sigma.real(flags.sigma.real());
    if (cmd.count("--sigma-im")) spec.sigma.imag(flags.sigma.imag());
    if (cmd.count("--method")) spec.methods = flags.methods;
    if (cmd.count("--teps")) spec.teps = flags.teps;
    if (cmd.count("--droptol")) spec.droptol = flags.droptol;
    if (cmd.count("--mmax")) spec.m_max = flags.m_max;
    if (cmd.count("--max-restarts")) spec.max_restarts = flags.max_restarts;
    if (cmd.count("--gmres-restart")) spec.gmres_restart = flags.gmres_restart;
    if (cmd.count("--gmres-maxit")) spec.gmres_maxit = flags.gmres_maxit;
    if (cmd.count("--seed")) spec.seed = flags.seed;
    if (cmd.count("--out")) spec.out_dir = flags.out_dir;
    if (spec.matrix_path.empty()) throw ConfigError("--matrix is required");
    spec.validate();
  } catch (const std::exception& e) {
    std::cerr << "sirajd: " << e.what() << "\n";
    return kConfigError;
  }

  SparseMatrix a;
  try {
    a = mm_load(spec.matrix_path);
  } catch (const std::exception& e) {
    std::cerr << "sirajd: " << e.what() << "\n";
    return kConfigError;
  }

  bench::ExperimentReport report = bench::run_experiment(spec, a);
  try {
    bench::emit_report(report, spec.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "sirajd: " << e.what() << "\n";
    return kConfigError;
  }
  if (!quiet) std::cout << bench::summary_table(report);
  for (const auto& run : report.runs)
    if (!run.error.empty()) std::cerr << "sirajd: " << run.label << ": " << run.error << "\n";
  return bench::exit_code(report);
}

int run_verify(std::size_t probes, std::uint64_t seed, const std::vector<std::size_t>& sizes) {
  using namespace sirajd::theory;
  SuiteOptions opts;
  opts.probes = probes;
  opts.seed = seed;
  if (!sizes.empty()) opts.sizes = sizes;
  bool ok = true;
  for (auto run : {run_identity_suite, run_inequality_suite, run_tau_calibration}) {
    const SuiteReport r = run(opts);
    std::cout << format_report(r);
    ok = ok && r.passed();
  }
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse interior eigensolvers: SIRA, Jacobi-Davidson and shift-invert Arnoldi"};
  app.require_subcommand(1);

  sirajd::bench::ExperimentSpec flags;
  double sigma_re = 0.0;
  double sigma_im = 0.0;
  std::vector<std::string> method_names;
  std::string config_path;
  bool quiet = false;

  auto* solve = app.add_subcommand("solve", "run solvers on a Matrix Market file and write reports");
  solve->add_option("--matrix", flags.matrix_path, "Matrix Market file");
  solve->add_option("--sigma-re", sigma_re, "real part of the target");
  solve->add_option("--sigma-im", sigma_im, "imaginary part of the target");
  solve->add_option("--method", method_names, "sira, jd, sira-exact, sia-exact, sia-inexact (repeatable)")
      ->delimiter(',');
  solve->add_option("--teps", flags.teps, "prescribed expansion accuracy (repeatable)")->delimiter(',');
  solve->add_option("--droptol", flags.droptol, "ILUT drop tolerance");
  solve->add_option("--mmax", flags.m_max, "outer iterations per cycle");
  solve->add_option("--max-restarts", flags.max_restarts, "maximum number of restarts");
  solve->add_option("--gmres-restart", flags.gmres_restart, "GMRES restart length");
  solve->add_option("--gmres-maxit", flags.gmres_maxit, "GMRES operator applications per inner solve");
  solve->add_option("--seed", flags.seed, "random start vector seed (0: all-ones start)");
  solve->add_option("--out", flags.out_dir, "output directory");
  solve->add_option("--config", config_path, "flat JSON config; flags override its fields");
  solve->add_flag("--quiet", quiet, "do not print the summary table");

  std::size_t probes = 500;
  std::uint64_t seed = 1;
  std::vector<std::size_t> sizes;
  auto* verify = app.add_subcommand("verify", "run the randomized dense property suites");
  verify->add_option("--probes", probes, "probes per suite");
  verify->add_option("--seed", seed, "base seed");
  verify->add_option("--sizes", sizes, "matrix orders cycled through by the probes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (*solve) {
    flags.sigma = {sigma_re, sigma_im};
    try {
      flags.methods.clear();
      for (const auto& m : method_names) flags.methods.push_back(sirajd::parse_method(m));
    } catch (const std::exception& e) {
      std::cerr << "sirajd: " << e.what() << "\n";
      return kConfigError;
    }
    return run_solve(flags, config_path, *solve, quiet);
  }
  if (probes == 0) {
    std::cerr << "sirajd: --probes must be positive\n";
    return kConfigError;
  }
  return run_verify(probes, seed, sizes);
}
