#include "sirajd/outer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace sirajd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vector default_start(std::size_t n) {
  return Vector(n, Complex{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
}

Vector normalized(ConstVectorView v) {
  const double nrm = norm2(v);
  if (nrm == 0.0) throw ConfigError("starting vector must be nonzero");
  Vector out(v.begin(), v.end());
  scale(1.0 / nrm, out);
  return out;
}

// sum_j z_j V(:, j) over the first z.size() columns
Vector combine_columns(const DenseMatrix& v, ConstVectorView z) {
  Vector out(v.rows(), Complex{0.0, 0.0});
  for (std::size_t j = 0; j < z.size(); ++j) axpy(z[j], v.col(j), out);
  return out;
}

Vector residual_of(const SparseMatrix& a, ConstVectorView y, Complex value) {
  Vector r = spmv(a, y);
  axpy(-value, y, r);
  return r;
}

GmresOptions gmres_options(const InnerSettings& inner) {
  GmresOptions o;
  o.restart = inner.restart;
  o.maxit = inner.maxit;
  return o;
}

double clamp_tol(double eps) { return std::clamp(eps, std::numeric_limits<double>::min(), 1.0); }

// Right-hand side of the SIRA system. When nu coincides with sigma the exact
// solution is y itself and the expansion degenerates, so nu is nudged.
Vector sira_rhs(const SubspaceState& state, Complex sigma) {
  if (state.nu != sigma) return state.residual;
  const Complex delta = 1e-13 * (1.0 + std::abs(sigma));
  Vector rhs = state.residual;
  axpy(-delta, state.y, rhs);
  return rhs;
}

InnerSolveReport sira_inner_solve(const SubspaceState& state, const SparseMatrix& a, Complex sigma,
                                  const IlutFactors& precond, double eps, const InnerSettings& inner) {
  const Vector rhs = sira_rhs(state, sigma);
  return gmres_right(make_operator(ShiftedOperator(a, sigma)), rhs, make_operator(precond), clamp_tol(eps),
                     gmres_options(inner));
}

InnerSolveReport jd_inner_solve(const SubspaceState& state, const SparseMatrix& a, Complex sigma,
                                const IlutFactors& precond, double eps, const InnerSettings& inner) {
  const ProjectedPreconditioner pp(precond, state.y);
  Vector rhs = state.residual;
  project_out(state.y, rhs);
  scale(-1.0, rhs);
  GmresOptions opts = gmres_options(inner);
  opts.constrain = [&y = state.y](VectorView w) { project_out(y, w); };
  InnerSolveReport rep =
      gmres_right(jd_projected_operator(a, sigma, state.y), rhs, make_operator(pp), clamp_tol(eps), opts);
  project_out(state.y, rep.solution);
  return rep;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Sira:
      return "sira";
    case Method::Jd:
      return "jd";
    case Method::SiraExact:
      return "sira-exact";
    case Method::SiaExact:
      return "sia-exact";
    case Method::SiaInexact:
      return "sia-inexact";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Sira, Method::Jd, Method::SiraExact, Method::SiaExact, Method::SiaInexact}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected sira, jd, sira-exact, sia-exact or sia-inexact)");
}

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::ConvergedByBreakdown:
      return "converged-by-breakdown";
    case SolveStatus::NotConverged:
      return "not-converged";
  }
  return "unknown";
}

void OuterConfig::validate() const {
  if (!(teps > 0.0 && teps < 0.5)) throw ConfigError("teps must lie in (0, 0.5)");
  if (m_max < 2) throw ConfigError("m_max must be at least 2");
  if (!(outer_tol_factor > 0.0)) throw ConfigError("outer tolerance factor must be positive");
  if (inner.restart == 0) throw ConfigError("GMRES restart must be positive");
  if (inner.maxit == 0) throw ConfigError("GMRES maxit must be positive");
  if (!(inner.droptol >= 0.0)) throw ConfigError("droptol must be nonnegative");
  if (!(exact_inner_tol > 0.0 && exact_inner_tol < 1.0)) throw ConfigError("exact inner tolerance must lie in (0, 1)");
  if (!(relaxation.floor > 0.0 && relaxation.floor <= relaxation.cap && relaxation.cap <= 1.0))
    throw ConfigError("relaxation floor/cap must satisfy 0 < floor <= cap <= 1");
}

std::size_t ConvergenceRecord::inner_iterations() const noexcept {
  std::size_t s = 0;
  for (const auto& it : iterations) s += it.inner_iterations;
  return s;
}

std::size_t ConvergenceRecord::capped_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(iterations.begin(), iterations.end(), [](const IterationRecord& it) { return it.eps_capped; }));
}

std::size_t ConvergenceRecord::inner_failures() const noexcept {
  return static_cast<std::size_t>(std::count_if(iterations.begin(), iterations.end(), [](const IterationRecord& it) {
    return it.inner_iterations > 0 && !it.inner_converged;
  }));
}

#define SIRAJD_SUM_FIELD(name)                          \
  double ConvergenceRecord::name() const noexcept {     \
    double s = 0.0;                                     \
    for (const auto& it : iterations) s += it.name;     \
    return s;                                           \
  }
SIRAJD_SUM_FIELD(t1)
SIRAJD_SUM_FIELD(t2)
SIRAJD_SUM_FIELD(t3)
SIRAJD_SUM_FIELD(t4)
#undef SIRAJD_SUM_FIELD

double outer_tolerance(const SparseMatrix& a, double factor) { return std::max(a.one_norm(), 1.0) * factor; }

void SubspaceState::extract(const SparseMatrix& a, Complex sigma) {
  ritz = small_eig(basis.projected(), sigma);
  nu = ritz.values[0];
  y = combine_columns(basis.basis(), ritz.vectors.col(0));
  residual = residual_of(a, y, nu);
  residual_norm = norm2(residual);
}

ExpandResult sira_expand(const SubspaceState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                         double eps, const InnerSettings& inner) {
  ExpandResult out;
  out.report = sira_inner_solve(state, a, sigma, precond, eps, inner);
  out.ortho = orthonormalize_against(state.v_basis(), out.report.solution);
  return out;
}

ExpandResult jd_expand(const SubspaceState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                       double eps, const InnerSettings& inner) {
  ExpandResult out;
  out.report = jd_inner_solve(state, a, sigma, precond, eps, inner);
  out.ortho = orthonormalize_against(state.v_basis(), out.report.solution);
  return out;
}

DenseMatrix ArnoldiState::square_block() const {
  const std::size_t k = steps();
  DenseMatrix h(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < std::min(k, j + 2); ++i) h(i, j) = hessenberg[j][i];
  return h;
}

namespace {

struct SiaTimings {
  double t1 = 0.0, t2 = 0.0, t4 = 0.0;
};

SiaStepResult sia_step_timed(ArnoldiState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                             double inner_tol, const InnerSettings& inner, SiaTimings& timings) {
  if (state.v_basis.cols() == 0) throw std::invalid_argument("sia_step: empty Arnoldi basis");
  if (state.invariant) throw std::logic_error("sia_step: Krylov subspace is already invariant");
  const std::size_t k = state.steps();
  SiaStepResult out;

  auto t0 = Clock::now();
  out.report = gmres_right(make_operator(ShiftedOperator(a, sigma)), state.v_basis.col(k), make_operator(precond),
                           clamp_tol(inner_tol), gmres_options(inner));
  timings.t4 += seconds_since(t0);

  t0 = Clock::now();
  OrthoResult ortho = orthonormalize_against(state.v_basis, out.report.solution);
  Vector column(k + 2, Complex{0.0, 0.0});
  std::copy(ortho.coefficients.begin(), ortho.coefficients.end(), column.begin());
  column[k + 1] = ortho.breakdown ? 0.0 : ortho.norm_after;
  state.hessenberg.push_back(std::move(column));
  if (ortho.breakdown) {
    state.invariant = true;
  } else {
    state.v_basis.append_column(ortho.v);
  }
  timings.t2 += seconds_since(t0);

  t0 = Clock::now();
  RitzSet theta = small_eig(state.square_block(), Complex{0.0, 0.0});
  timings.t1 += seconds_since(t0);
  out.ritz = theta;
  for (auto& v : out.ritz.values) {
    v = std::abs(v) == 0.0 ? Complex{std::numeric_limits<double>::infinity(), 0.0} : sigma + 1.0 / v;
  }
  order_by_target(out.ritz, sigma);
  out.value = out.ritz.values[0];
  out.y = combine_columns(state.v_basis, out.ritz.vectors.col(0));
  scale(1.0 / norm2(out.y), out.y);
  out.residual_norm = norm2(residual_of(a, out.y, out.value));
  return out;
}

struct CycleOutcome {
  SolveStatus status = SolveStatus::NotConverged;
  CycleSummary summary;
  Complex final_value{0.0, 0.0};
  Vector final_vector;
  double final_residual = 0.0;
};

void note_candidate(CycleSummary& s, std::size_t index, double res, Complex value, ConstVectorView y) {
  if (s.best_vector.empty() || res < s.best_residual_norm) {
    s.best_outer_index = index;
    s.best_residual_norm = res;
    s.best_value = value;
    s.best_vector.assign(y.begin(), y.end());
  }
}

CycleOutcome projection_cycle(const SparseMatrix& a, const OuterConfig& cfg, const IlutFactors& precond,
                              ConstVectorView start, double tol, std::size_t cycle, ConvergenceRecord& record) {
  CycleOutcome out;
  out.summary.first_outer_index = record.iterations.size() + 1;
  SubspaceState st(a);
  auto t0 = Clock::now();
  st.basis.append(start);
  double pending_t2 = seconds_since(t0);

  for (std::size_t k = 1; k <= cfg.m_max; ++k) {
    IterationRecord rec;
    rec.outer_index = record.iterations.size() + 1;
    rec.cycle = cycle;
    rec.t2 = pending_t2;
    pending_t2 = 0.0;

    t0 = Clock::now();
    st.ritz = small_eig(st.h(), cfg.sigma);
    rec.t1 = seconds_since(t0);
    st.nu = st.ritz.values[0];
    st.y = combine_columns(st.v_basis(), st.ritz.vectors.col(0));
    st.residual = residual_of(a, st.y, st.nu);
    st.residual_norm = norm2(st.residual);

    rec.ritz_value = st.nu;
    rec.residual_norm = st.residual_norm;
    note_candidate(out.summary, rec.outer_index, st.residual_norm, st.nu, st.y);
    out.final_value = st.nu;
    out.final_vector = st.y;
    out.final_residual = st.residual_norm;

    if (st.residual_norm <= tol) {
      out.status = SolveStatus::Converged;
      record.iterations.push_back(rec);
      break;
    }
    if (k == cfg.m_max) {
      record.iterations.push_back(rec);
      break;
    }

    InnerTolerance eps{cfg.exact_inner_tol, false};
    if (cfg.method == Method::Sira || cfg.method == Method::Jd) {
      eps = compute_inner_tol(cfg.teps, st.ritz, cfg.sigma, st.nu, k);
    }
    rec.inner_tol = eps.eps;
    rec.eps_capped = eps.capped;

    t0 = Clock::now();
    const InnerSolveReport rep = cfg.method == Method::Jd
                                     ? jd_inner_solve(st, a, cfg.sigma, precond, eps.eps, cfg.inner)
                                     : sira_inner_solve(st, a, cfg.sigma, precond, eps.eps, cfg.inner);
    rec.t4 = seconds_since(t0);
    rec.inner_iterations = rep.iterations;
    rec.inner_relres = rep.relres;
    rec.inner_converged = rep.converged;

    t0 = Clock::now();
    const OrthoResult ortho = orthonormalize_against(st.v_basis(), rep.solution);
    if (!ortho.breakdown) st.basis.append(ortho.v);
    rec.t2 += seconds_since(t0);
    record.iterations.push_back(rec);

    if (ortho.breakdown) {
      out.status = SolveStatus::ConvergedByBreakdown;
      break;
    }
  }
  return out;
}

CycleOutcome arnoldi_cycle(const SparseMatrix& a, const OuterConfig& cfg, const IlutFactors& precond,
                           ConstVectorView start, double tol, std::size_t cycle, double last_residual,
                           ConvergenceRecord& record) {
  CycleOutcome out;
  out.summary.first_outer_index = record.iterations.size() + 1;
  ArnoldiState st;
  st.v_basis.append_column(start);

  for (std::size_t k = 1; k <= cfg.m_max; ++k) {
    IterationRecord rec;
    rec.outer_index = record.iterations.size() + 1;
    rec.cycle = cycle;
    rec.inner_tol = cfg.method == Method::SiaExact
                        ? cfg.exact_inner_tol
                        : relaxed_sia_tol(tol, cfg.m_max, last_residual, cfg.relaxation);

    SiaTimings tm;
    const SiaStepResult step = sia_step_timed(st, a, cfg.sigma, precond, rec.inner_tol, cfg.inner, tm);
    rec.t1 = tm.t1;
    rec.t2 = tm.t2;
    rec.t4 = tm.t4;
    rec.inner_iterations = step.report.iterations;
    rec.inner_relres = step.report.relres;
    rec.inner_converged = step.report.converged;
    rec.ritz_value = step.value;
    rec.residual_norm = step.residual_norm;
    record.iterations.push_back(rec);
    last_residual = step.residual_norm;

    note_candidate(out.summary, rec.outer_index, step.residual_norm, step.value, step.y);
    out.final_value = step.value;
    out.final_vector = step.y;
    out.final_residual = step.residual_norm;

    if (step.residual_norm <= tol) {
      out.status = SolveStatus::Converged;
      break;
    }
    if (st.invariant) {
      out.status = SolveStatus::ConvergedByBreakdown;
      break;
    }
  }
  return out;
}

SolveResult run_cycles(const SparseMatrix& a, const OuterConfig& cfg, const IlutFactors* precond,
                       std::size_t max_restarts) {
  cfg.validate();
  SolveResult res;
  res.tolerance = outer_tolerance(a, cfg.outer_tol_factor);

  double t3 = 0.0;
  std::optional<IlutFactors> own;
  if (precond == nullptr) {
    const auto t0 = Clock::now();
    own = ilut_factor(a, cfg.sigma, cfg.inner.droptol);
    t3 = seconds_since(t0);
    precond = &*own;
  }

  Vector start = cfg.start ? normalized(*cfg.start) : default_start(a.size());
  require_same_size(a.size(), start.size(), "run_solver start vector");
  const bool arnoldi = cfg.method == Method::SiaExact || cfg.method == Method::SiaInexact;
  double last_residual = std::numeric_limits<double>::quiet_NaN();

  CycleOutcome outcome;
  for (std::size_t cycle = 0;; ++cycle) {
    outcome = arnoldi ? arnoldi_cycle(a, cfg, *precond, start, res.tolerance, cycle, last_residual, res.record)
                      : projection_cycle(a, cfg, *precond, start, res.tolerance, cycle, res.record);
    res.cycles.push_back(outcome.summary);
    if (outcome.status != SolveStatus::NotConverged || cycle >= max_restarts) break;
    start = normalized(outcome.summary.best_vector);
    last_residual = outcome.summary.best_residual_norm;
    ++res.restarts;
  }
  if (!res.record.iterations.empty()) res.record.iterations.front().t3 = t3;

  res.status = outcome.status;
  if (outcome.status == SolveStatus::Converged) {
    res.eigenvalue = outcome.final_value;
    res.eigenvector = outcome.final_vector;
    res.residual_norm = outcome.final_residual;
  } else {
    // best candidate over all cycles
    const auto best = std::min_element(res.cycles.begin(), res.cycles.end(), [](const auto& x, const auto& y) {
      return x.best_residual_norm < y.best_residual_norm;
    });
    res.eigenvalue = best->best_value;
    res.eigenvector = best->best_vector;
    res.residual_norm = best->best_residual_norm;
  }
  return res;
}

}  // namespace

SiaStepResult sia_step(ArnoldiState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                       double inner_tol, const InnerSettings& inner) {
  SiaTimings ignored;
  return sia_step_timed(state, a, sigma, precond, inner_tol, inner, ignored);
}

SolveResult run_solver(const SparseMatrix& a, const OuterConfig& config, const IlutFactors* precond) {
  return run_cycles(a, config, precond, 0);
}

SolveResult run_restarted(const SparseMatrix& a, const OuterConfig& config, const IlutFactors* precond) {
  return run_cycles(a, config, precond, config.max_restarts);
}

}  // namespace sirajd
