// Acceptance checks. Prints one PASS / FAIL / SKIP line per criterion.
//
//   acceptance [theory] [rules] [proxy] [sherman5]
//
// With no arguments every group runs. Exit status: 0 when nothing failed,
// 1 on any failure, 77 when every selected criterion was skipped.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "oracle.hpp"
#include "sirajd/bench.hpp"
#include "sirajd/outer.hpp"
#include "sirajd/theory.hpp"
#include "sirajd/tolerance.hpp"

using namespace sirajd;
namespace fs = std::filesystem;

namespace {

int g_pass = 0;
int g_fail = 0;
int g_skip = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  (ok ? g_pass : g_fail)++;
}

void skip(const std::string& name, const std::string& why) {
  std::printf("SKIP %s: %s\n", name.c_str(), why.c_str());
  std::fflush(stdout);
  ++g_skip;
}

void info(const std::string& name, const std::string& detail) {
  std::printf("INFO %s: %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- theory

void theory_group() {
  theory::SuiteOptions opts;
  opts.probes = 500;
  opts.seed = 1;
  opts.sizes = {40, 80, 160};

  const theory::SuiteReport id = theory::run_identity_suite(opts);
  std::fputs(theory::format_report(id).c_str(), stdout);
  bool ok = id.probes >= 500 && id.seconds < 60.0;
  std::string worst;
  for (const auto& c : id.checks) {
    ok = ok && c.violations == 0 && c.evaluated > 0 && c.max_residual <= c.tolerance;
    worst += fmt(" %s=%.2e", c.name.c_str(), c.max_residual);
  }
  report(ok, "identity_suite", fmt("%zu probes in %.1f s;", id.probes, id.seconds) + worst);

  const theory::SuiteReport in = theory::run_inequality_suite(opts);
  std::fputs(theory::format_report(in).c_str(), stdout);
  std::size_t violations = 0;
  std::size_t admissible = std::numeric_limits<std::size_t>::max();
  for (const auto& c : in.checks) {
    violations += c.violations;
    if (c.name != "sep_continuity") admissible = std::min(admissible, c.evaluated);
  }
  const auto* tau = in.find("tau_ratio_bounds");
  const auto* cont = in.find("sep_continuity");
  report(violations == 0 && admissible >= 500 && in.seconds < 120.0, "inequality_suite",
         fmt("%zu probes, fewest admissible per check %zu, %zu violations, %.1f s", in.probes, admissible, violations,
             in.seconds));
  if (tau) info("tau_bounds_admissible", fmt("%zu admissible, %zu skipped (tau >= 1)", tau->evaluated, tau->skipped));
  if (cont)
    info("sep_continuity", fmt("%zu converged probes, max relative sep difference %.2e", cont->evaluated,
                               cont->max_residual));

  const theory::SuiteReport cal = theory::run_tau_calibration(opts);
  std::fputs(theory::format_report(cal).c_str(), stdout);
  bool cal_ok = true;
  std::size_t evaluated = 0;
  for (const auto& c : cal.checks) {
    cal_ok = cal_ok && c.violations == 0 && c.evaluated > 0;
    evaluated += c.evaluated;
  }
  report(cal_ok, "tau_calibration",
         fmt("%zu constructed probes with tau = 0.01, ratio within [0.99, 1.01] for all", evaluated));
}

// ----------------------------------------------------------------- rules

RitzSet ritz_of(std::initializer_list<Complex> values, Complex sigma) {
  RitzSet r;
  r.values = values;
  r.vectors = DenseMatrix::identity(r.values.size());
  order_by_target(r, sigma);
  return r;
}

void rules_group() {
  const InnerTolerance first = compute_inner_tol(1e-3, ritz_of({1.0, 2.0}, 0.0), 0.0, 1.0, 1);
  const InnerTolerance formula = compute_inner_tol(1e-3, ritz_of({1.0, 2.0}, 0.0), 0.0, 1.0, 2);
  const InnerTolerance far = compute_inner_tol(1e-2, ritz_of({1.0, 100.0}, 0.0), 0.0, 1.0, 2);
  const InnerTolerance capped = compute_inner_tol(1e-2, ritz_of({1.0, 1.001}, 0.0), 0.0, 1.0, 2);
  const bool ok = first.eps == 1e-3 && !first.capped && formula.eps == 4e-3 && !formula.capped &&
                  far.eps == 2e-2 * (100.0 / 99.0) && !far.capped && capped.eps == 0.1 && capped.capped;
  report(ok, "tolerance_rule",
         fmt("m=1 -> %.17g; (1e-3, nu2=2) -> %.17g; (1e-2, nu2=100) -> %.17g; (1e-2, nu2=1.001) -> %.17g capped=%d",
             first.eps, formula.eps, far.eps, capped.eps, int(capped.capped)));

  Vector d(10);
  for (std::size_t i = 0; i < 10; ++i) d[i] = static_cast<double>(i + 1);
  const SparseMatrix a = SparseMatrix::diagonal(d);
  bool all_ok = true;
  std::string detail;
  for (Method m : {Method::Sira, Method::Jd, Method::SiraExact, Method::SiaExact, Method::SiaInexact}) {
    OuterConfig c;
    c.sigma = 3.2;
    c.method = m;
    c.m_max = 2;
    c.max_restarts = 40;
    const SolveResult r = run_restarted(a, c);
    const double slack = 1e-12 * a.one_norm();
    bool ok_m = r.cycles.size() > 1 && r.cycles.size() == r.restarts + 1;
    for (std::size_t i = 0; i < r.cycles.size(); ++i) {
      const CycleSummary& cy = r.cycles[i];
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (const auto& it : r.record.iterations)
        if (it.cycle == i && it.residual_norm < best) {
          best = it.residual_norm;
          arg = it.outer_index;
        }
      ok_m = ok_m && cy.best_residual_norm == best && cy.best_outer_index == arg;
      if (i > 0) {
        const auto& head = r.record.iterations[cy.first_outer_index - 1];
        ok_m = ok_m && cy.best_residual_norm <= r.cycles[i - 1].best_residual_norm + slack;
        ok_m = ok_m && std::abs(head.residual_norm - r.cycles[i - 1].best_residual_norm) <= slack;
      }
    }
    all_ok = all_ok && ok_m;
    detail += fmt(" %s: %zu cycles, best %.3e (%s);", std::string(method_name(m)).c_str(), r.cycles.size(),
                  r.residual_norm, std::string(status_name(r.status)).c_str());
  }
  report(all_ok, "restart_correctness", "diag(1..10), sigma=3.2, m_max=2." + detail);
}

// ------------------------------------------------------- reproduction runs

struct Reproduction {
  bench::ExperimentReport report;
  double seconds = 0.0;
  const bench::RunRecord* find(Method m) const {
    for (const auto& r : report.runs)
      if (r.method == m) return &r;
    return nullptr;
  }
};

Reproduction reproduce(const SparseMatrix& a) {
  bench::ExperimentSpec spec;
  spec.matrix_path = "in-memory";
  spec.sigma = 0.0;
  spec.methods = {Method::SiraExact, Method::Sira, Method::Jd, Method::SiaInexact};
  spec.teps = {1e-3};
  spec.droptol = 1e-3;
  spec.m_max = 30;
  spec.gmres_restart = 30;
  const auto t0 = std::chrono::steady_clock::now();
  Reproduction out;
  out.report = bench::run_experiment(spec, a);
  out.seconds = seconds_since(t0);
  std::fputs(bench::summary_table(out.report).c_str(), stdout);
  return out;
}

bool sig_digits_match(Complex computed, double reference, int digits) {
  // rounding both to `digits` significant figures
  const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(reference))));
  return std::abs(computed.imag()) * scale < 0.5 &&
         std::round(computed.real() * scale) == std::round(reference * scale);
}

/// Longest tail over which the outer residual strictly decreases; returns the
/// start index of that tail.
std::size_t monotone_tail(const std::vector<IterationRecord>& it) {
  std::size_t k = it.size() - 1;
  while (k > 0 && it[k].residual_norm < it[k - 1].residual_norm) --k;
  return k;
}

void relaxation_shape(const std::string& tag, const Reproduction& rep) {
  const bench::RunRecord* sia = rep.find(Method::SiaInexact);
  if (!sia || sia->result.record.iterations.size() < 3) {
    report(false, tag + "relaxation_shape", "inexact SIA run missing or too short");
    return;
  }
  const auto& it = sia->result.record.iterations;
  const std::size_t k0 = monotone_tail(it);
  bool tol_ok = true;
  for (std::size_t k = k0 + 1; k < it.size(); ++k) tol_ok = tol_ok && it[k].inner_tol >= it[k - 1].inner_tol;
  const std::size_t n = it.size();
  const std::size_t third = std::max<std::size_t>(2, n / 3);
  bool count_ok = true;
  std::string counts;
  for (std::size_t k = n - third; k < n; ++k) {
    counts += fmt("%s%zu", k == n - third ? "" : ",", it[k].inner_iterations);
    if (k > n - third) count_ok = count_ok && it[k].inner_iterations <= it[k - 1].inner_iterations;
  }
  count_ok = count_ok && it[n - 1].inner_iterations < it[n - third].inner_iterations;
  std::string tols;
  for (std::size_t k = k0; k < n; ++k) tols += fmt("%s%.1e", k == k0 ? "" : ",", it[k].inner_tol);
  report(tol_ok && count_ok, tag + "relaxation_shape",
         fmt("residual decreasing from outer step %zu; inner tol there %s; final-third inner iterations %s", k0 + 1,
             tols.c_str(), counts.c_str()));
}

void reproduction_claims(const std::string& tag, const Reproduction& rep, double lambda_ref, bool absolute_bounds,
                         double time_limit) {
  const auto* exact = rep.find(Method::SiraExact);
  const auto* sira = rep.find(Method::Sira);
  const auto* jd = rep.find(Method::Jd);
  const auto* sia = rep.find(Method::SiaInexact);
  if (!exact || !sira || !jd || !sia) {
    report(false, tag + "runs", "missing runs");
    return;
  }
  bool lam_ok = true;
  std::string lams;
  for (const auto& r : rep.report.runs) {
    lam_ok = lam_ok && r.status == "converged" && sig_digits_match(r.result.eigenvalue, lambda_ref, 4);
    lams += fmt(" %s=%.6e%+.1ei", r.label.c_str(), r.result.eigenvalue.real(), r.result.eigenvalue.imag());
  }
  report(lam_ok, tag + "eigenvalue", fmt("reference %.5e, 4 significant digits;", lambda_ref) + lams);

  const std::size_t i_exact = exact->result.record.outer_iterations();
  if (absolute_bounds) {
    report(exact->status == "converged" && i_exact <= 14, tag + "exact_sira_outer",
           fmt("I_out = %zu (bound 14)", i_exact));
  } else {
    info(tag + "exact_sira_outer", fmt("I_out = %zu (the bound 14 is calibrated to sherman5 only)", i_exact));
  }
  const std::size_t i_sira = sira->result.record.outer_iterations();
  const std::size_t i_jd = jd->result.record.outer_iterations();
  report(sira->status == "converged" && jd->status == "converged" && i_sira <= i_exact + 4 && i_jd <= i_exact + 4,
         tag + "inexact_mimics_exact", fmt("I_out exact SIRA %zu, SIRA(1e-3) %zu, JD(1e-3) %zu (allowed %zu)", i_exact,
                                           i_sira, i_jd, i_exact + 4));
  const std::size_t inn_sira = sira->result.record.inner_iterations();
  const std::size_t inn_sia = sia->result.record.inner_iterations();
  report(sia->status == "converged" && inn_sira < inn_sia, tag + "sira_fewer_inner_than_sia",
         fmt("I_inn SIRA(1e-3) %zu < inexact SIA %zu", inn_sira, inn_sia));
  relaxation_shape(tag, rep);
  report(rep.seconds < time_limit, tag + "runtime", fmt("%.1f s (limit %.0f s)", rep.seconds, time_limit));
}

/// Smallest eigenvalue of the 5-point convection-diffusion operator, from the
/// closed form for tridiagonal Toeplitz matrices.
double convection_diffusion_min_eig(std::size_t grid, double bx, double by) {
  const double h = 1.0 / static_cast<double>(grid + 1);
  const double c = std::cos(std::numbers::pi * h);
  auto part = [&](double beta) {
    const double t = beta * h / 2.0;
    return 2.0 - 2.0 * std::sqrt(1.0 - t * t) * c;
  };
  return part(bx) + part(by);
}

void proxy_group() {
  const std::size_t grid = 58;
  const SparseMatrix a = testutil::convection_diffusion(grid, 20.0, 10.0);
  const double lambda = convection_diffusion_min_eig(grid, 20.0, 10.0);
  info("proxy", fmt("sherman5 stand-in: convection-diffusion, %zu x %zu grid, n = %zu, ||A||_1 = %g", grid, grid,
                    a.size(), a.one_norm()));
  reproduction_claims("proxy_", reproduce(a), lambda, false, 300.0);
}

void sherman5_group() {
  fs::path path;
  if (const char* env = std::getenv("SIRAJD_SHERMAN5")) path = env;
  else path = fs::path(SIRAJD_TEST_DATA_DIR) / "sherman5.mtx";
  if (!fs::exists(path)) {
    for (const char* name : {"sherman5_eigenvalue", "sherman5_exact_sira_outer", "sherman5_inexact_mimics_exact",
                             "sherman5_sira_fewer_inner_than_sia", "sherman5_relaxation_shape", "sherman5_runtime"})
      skip(name, "matrix file not found (set SIRAJD_SHERMAN5 or place tests/data/sherman5.mtx)");
    return;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const SparseMatrix a = mm_load(path);
  report(a.size() == 3312, "sherman5_size", fmt("n = %zu", a.size()));
  Reproduction rep = reproduce(a);
  rep.seconds += seconds_since(t0) - rep.seconds;
  reproduction_claims("sherman5_", rep, 4.6925e-2, true, 300.0);
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void()>> groups{
      {"theory", theory_group}, {"rules", rules_group}, {"proxy", proxy_group}, {"sherman5", sherman5_group}};
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    if (!groups.count(argv[i])) {
      std::fprintf(stderr, "unknown group '%s'\n", argv[i]);
      return 2;
    }
    selected.push_back(argv[i]);
  }
  if (selected.empty()) selected = {"theory", "rules", "proxy", "sherman5"};
  for (const auto& g : selected) groups.at(g)();
  std::printf("summary: %d passed, %d failed, %d skipped\n", g_pass, g_fail, g_skip);
  if (g_fail > 0) return 1;
  if (g_pass == 0 && g_skip > 0) return 77;
  return 0;
}
