#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sirajd/dense.hpp"
#include "sirajd/ilut.hpp"
#include "sirajd/krylov.hpp"
#include "sirajd/sparse.hpp"
#include "sirajd/tolerance.hpp"

namespace sirajd {

enum class Method {
  Sira,        // inexact SIRA, adaptive inner tolerance
  Jd,          // Jacobi-Davidson with fixed target, adaptive inner tolerance
  SiraExact,   // SIRA with inner systems solved to 1e-14
  SiaExact,    // shift-invert Arnoldi, inner systems solved to 1e-14
  SiaInexact,  // shift-invert Arnoldi with relaxed inner tolerance
};

std::string_view method_name(Method m);
/// Accepts the names produced by method_name; throws std::invalid_argument.
Method parse_method(std::string_view name);

struct InnerSettings {
  std::size_t restart = 30;
  std::size_t maxit = 300;
  double droptol = 1e-3;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OuterConfig {
  Complex sigma{0.0, 0.0};
  double teps = 1e-3;
  double outer_tol_factor = 1e-10;
  std::size_t m_max = 30;  // outer iterations per cycle; also the SIA relaxation budget
  std::size_t max_restarts = 0;
  Method method = Method::Sira;
  InnerSettings inner;
  double exact_inner_tol = 1e-14;
  RelaxationSettings relaxation;
  /// Starting vector; the normalized all-ones vector when empty.
  std::optional<Vector> start;

  /// Throws ConfigError.
  void validate() const;
};

/// Current projection state of SIRA / JD: basis, H = V^H A V, selected Ritz pair
/// and its residual r = A y - nu y.
struct SubspaceState {
  explicit SubspaceState(const SparseMatrix& a) : basis(a) {}

  ProjectedBasis basis;
  RitzSet ritz;
  Complex nu{0.0, 0.0};
  Vector y;
  Vector residual;
  double residual_norm = 0.0;

  const DenseMatrix& v_basis() const noexcept { return basis.basis(); }
  const DenseMatrix& h() const noexcept { return basis.projected(); }

  /// Solves the projected eigenproblem and refreshes nu, y and the residual.
  void extract(const SparseMatrix& a, Complex sigma);
};

struct IterationRecord {
  std::size_t outer_index = 0;  // 1-based, counted across restart cycles
  std::size_t cycle = 0;
  Complex ritz_value{0.0, 0.0};
  double residual_norm = 0.0;
  double inner_tol = 0.0;  // 0 when no inner solve was performed at this step
  std::size_t inner_iterations = 0;
  double inner_relres = 0.0;
  bool inner_converged = true;
  bool eps_capped = false;
  double t1 = 0.0;  // small eigenproblems
  double t2 = 0.0;  // orthonormalization and projected-matrix updates
  double t3 = 0.0;  // preconditioner construction
  double t4 = 0.0;  // inner Krylov solves
};

struct ConvergenceRecord {
  std::vector<IterationRecord> iterations;

  std::size_t outer_iterations() const noexcept { return iterations.size(); }
  std::size_t inner_iterations() const noexcept;
  std::size_t capped_count() const noexcept;
  std::size_t inner_failures() const noexcept;
  double t1() const noexcept;
  double t2() const noexcept;
  double t3() const noexcept;
  double t4() const noexcept;
};

/// Best candidate of one restart cycle: argmin over the cycle of ||A y - nu y||.
struct CycleSummary {
  std::size_t first_outer_index = 0;
  std::size_t best_outer_index = 0;
  double best_residual_norm = 0.0;
  Complex best_value{0.0, 0.0};
  Vector best_vector;
};

enum class SolveStatus { Converged, ConvergedByBreakdown, NotConverged };
std::string_view status_name(SolveStatus s);

struct SolveResult {
  Complex eigenvalue{0.0, 0.0};
  Vector eigenvector;
  double residual_norm = 0.0;
  double tolerance = 0.0;
  SolveStatus status = SolveStatus::NotConverged;
  ConvergenceRecord record;
  std::size_t restarts = 0;
  std::vector<CycleSummary> cycles;
};

/// Outer convergence threshold max(||A||_1, 1) * factor.
double outer_tolerance(const SparseMatrix& a, double factor);

struct ExpandResult {
  OrthoResult ortho;
  InnerSolveReport report;
};

/// SIRA expansion: solve (A - sigma I) u = r to relative residual eps and
/// orthonormalize u against V.
ExpandResult sira_expand(const SubspaceState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                         double eps, const InnerSettings& inner = {});

/// JD expansion: solve the correction equation for u orthogonal to y with the
/// projected preconditioner, right-hand side -r, then orthonormalize.
ExpandResult jd_expand(const SubspaceState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                       double eps, const InnerSettings& inner = {});

/// Arnoldi state for shift-invert Arnoldi: B V_k ~= V_{k+1} Hbar_k.
struct ArnoldiState {
  DenseMatrix v_basis;               // n x (k+1) once step k is done
  std::vector<Vector> hessenberg;    // column j holds j+2 coefficients
  bool invariant = false;            // last orthonormalization broke down
  std::size_t steps() const noexcept { return hessenberg.size(); }
  /// Square k x k leading block of Hbar_k.
  DenseMatrix square_block() const;
};

struct SiaStepResult {
  InnerSolveReport report;
  RitzSet ritz;           // recovered approximations sigma + 1/theta, ordered by distance to sigma
  Complex value{0.0, 0.0};
  Vector y;
  double residual_norm = 0.0;
};

/// One Arnoldi step on B = (A - sigma I)^{-1}: solve (A - sigma I) u = v_k to
/// inner_tol, orthonormalize into the basis, then extract the Ritz pair of B
/// whose recovered eigenvalue sigma + 1/theta is nearest sigma.
SiaStepResult sia_step(ArnoldiState& state, const SparseMatrix& a, Complex sigma, const IlutFactors& precond,
                       double inner_tol, const InnerSettings& inner = {});

/// One cycle of the selected method from the configured start vector
/// (non-restarted algorithm). `precond`, when given, replaces the ILUT build.
SolveResult run_solver(const SparseMatrix& a, const OuterConfig& config, const IlutFactors* precond = nullptr);

/// Restarted variant: after an unconverged cycle the basis collapses to the
/// cycle's best candidate vector, for at most config.max_restarts restarts.
SolveResult run_restarted(const SparseMatrix& a, const OuterConfig& config, const IlutFactors* precond = nullptr);

}  // namespace sirajd
