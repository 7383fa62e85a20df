#pragma once

// Dense brute-force verification of the inner/outer accuracy relations on
// small random instances.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sirajd/vector.hpp"

namespace sirajd::theory {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Dense eigen-information about A near the target: the desired pair (lambda, x),
/// B = (A - sigma I)^{-1}, and the block partition of B in the unitary basis
/// (x, X_perp): c^H = x^H B X_perp, L = X_perp^H B X_perp.
struct OracleEig {
  CVec values;
  CMat vectors;
  Complex lambda{0.0, 0.0};
  CVec x;
  CMat b;
  double b_norm = 0.0;       // ||B||_2
  double b_cond = 0.0;       // kappa(B)
  double gap = 0.0;          // min |lambda_i - lambda| over the rest of the spectrum
  double reconstruction = 0.0;  // ||A - X Lambda X^{-1}|| / ||A||
  CMat x_perp;
  CVec c;
  CMat l;

  /// ||(L - alpha I)^{-1}||^{-1}, the smallest singular value of L - alpha I.
  double sep(Complex alpha) const;
};

OracleEig make_oracle(const CMat& a, Complex sigma);
/// Same, for A = Q T Q^H with Q unitary and T upper triangular: eigenvectors come
/// from back-substitution on T.
OracleEig make_oracle(const CMat& a, const CMat& q, const CMat& t, Complex sigma);

/// Which unified inner system the probe's u solves:
/// (A - sigma I) u = alpha1 y + (A - sigma I) y.
enum class Expansion { Sira, Jd };

struct AnalysisProbe {
  CMat a;
  Complex sigma{0.0, 0.0};
  OracleEig oracle;
  CMat v_basis;  // orthonormal n x m
  Complex nu{0.0, 0.0};
  CVec y;        // unit Ritz vector from V
  CVec f;        // unit error direction
  double eps = 0.0;  // relative error of the perturbed solution
  std::uint64_t seed = 0;

  std::size_t n() const { return static_cast<std::size_t>(a.rows()); }
  /// alpha1 of the unified system; alpha2 = 1 in both cases.
  Complex alpha1(Expansion kind) const;
  /// alpha = -alpha2 / alpha1: 1/(nu - sigma) or y^H B y.
  Complex alpha(Expansion kind) const;
  /// Exact solution u = alpha1 B y + y.
  CVec exact_solution(Expansion kind) const;
  /// u + eps ||u|| f.
  CVec perturbed_solution(Expansion kind) const;
};

struct ProbeOptions {
  std::size_t n = 80;
  std::size_t m = 5;
  double eps = 1e-3;
  double nonnormality = 0.3;   // scale of the strictly upper part of the Schur factor
  bool converged = false;      // tilt angle 1e-7
};

/// A = Q T Q^H with Q random unitary and T upper triangular carrying placed
/// eigenvalues, lambda = T(0,0) nearest sigma. V spans cos(t) x + sin(t) g plus
/// m-1 random directions, t log-uniform in [1e-3, 0.5]; converged probes use
/// t = 1e-7 and no extra directions;
/// y is the Ritz vector of V^H A V nearest sigma; f is a random unit vector.
AnalysisProbe make_probe(const ProbeOptions& opts, std::uint64_t seed);

// Elementary geometry.
double sine(const CVec& a, const CVec& b);
double subspace_sine(const CMat& v, const CVec& y);
CVec project_complement(const CMat& v, const CVec& w);  // (I - V V^H) w, applied twice
CMat orthonormal_basis(const CMat& w);                   // Householder QR thin Q

struct Lemma1Result {
  double lhs = 0.0;   // sin(v~, v)
  double rhs = 0.0;   // eps~ sin(v~, f_perp)
  double teps = 0.0;  // eps~
  double residual = 0.0;
  bool rejected = false;  // (I - P_V) u = 0
};
Lemma1Result check_lemma1(const AnalysisProbe& p, Expansion kind);

struct ExpansionIdentityResult {
  double lhs = 0.0;  // sin(V+, x)
  double rhs = 0.0;  // sin(V, x) sin(v, x_perp)
  double residual = 0.0;
  bool invariant = false;  // sin(v, x_perp) = 0
};
ExpansionIdentityResult check_expansion_identity(const AnalysisProbe& p, Expansion kind = Expansion::Sira);

/// Runs `steps` exact SIRA expansions from v1 and compares sin(V_{k+1}, x)
/// with sin(v1, x) times the product of the one-step improvements.
ExpansionIdentityResult check_sine_product(const AnalysisProbe& p, const CVec& v1, std::size_t steps = 5);

struct TauResult {
  double ratio = 1.0;  // sin(V~+, x) / sin(V+, x)
  double tau = 0.0;
  double teps = 0.0;
  bool admissible = false;  // tau < 1
  bool holds = true;
};
TauResult check_tau_bounds(const AnalysisProbe& p, Expansion kind);

/// Probe whose eps is rescaled so that tau equals `tau` exactly; `adversarial`
/// points f_perp along the part of x_perp orthogonal to v.
AnalysisProbe calibrate_tau(const AnalysisProbe& p, Expansion kind, double tau, bool adversarial);

struct EpsBoundResult {
  Complex alpha{0.0, 0.0};
  double eps = 0.0;
  double teps = 0.0;
  double sep = 0.0;
  double sin_yx = 0.0;
  double sin_vf = 0.0;
  double residual_b = 0.0;  // ||B y - alpha y||
  double general_rhs = 0.0;   // 2||B|| sin(y,x) eps~ / (||By - alpha y|| sin(V,f))
  double sep_rhs = 0.0;       // 2||B|| eps~ / (sep sin(V,f))
  double lemma_rhs = 0.0;     // ||By - alpha y|| / sep
  bool rejected = false;      // alpha numerically an eigenvalue of L
  bool general_holds = true;
  bool sep_holds = true;
  bool lemma_holds = true;
};
EpsBoundResult check_eps_bound(const AnalysisProbe& p, Expansion kind);

struct SandwichResult {
  double relerr = 0.0;
  double relres = 0.0;
  double kappa = 0.0;
  bool holds = true;
};
/// SIRA: u = B r, kappa(B). JD: u solves the correction equation in y-perp,
/// the perturbation is kept in y-perp and kappa is that of the restriction
/// Y_perp^H (A - sigma I) Y_perp.
SandwichResult check_residual_sandwich(const AnalysisProbe& p, Expansion kind);

struct EquivalenceResult {
  double max_sine = 0.0;       // pairwise sines of the three expansion directions
  double max_scaled_diff = 0.0;  // relative gap between (I-P)By, (I-P)u_S/(sigma-nu), (I-P)u_J/gamma
  double gamma_relerr = 0.0;   // fitted gamma vs 1/(y^H B y)
  double us_relerr = 0.0;      // B r_S vs (sigma - nu) B y + y
  double uj_y_inner = 0.0;     // |y^H u_J| / ||u_J||
  bool rejected = false;       // sigma == nu
};
EquivalenceResult check_equivalence(const AnalysisProbe& p);

struct ProjectionBoundsResult {
  double image_lhs = 0.0;  // ||(I - P_V) B y||
  double image_rhs = 0.0;  // 2||B|| sin(y, x)
  double cos_lhs = 0.0;    // |cos(v, x_perp)|
  double cos_rhs = 0.0;    // 2||B|| sin(y, x) / ||(I - P_V) B y||
  bool image_holds = true;
  bool cos_holds = true;
  bool rejected = false;   // x in span(V)
};
ProjectionBoundsResult check_projection_bounds(const AnalysisProbe& p);

struct OptimalAlphaResult {
  Complex rayleigh{0.0, 0.0};      // y^H B y
  Complex least_squares{0.0, 0.0}; // 1-D least-squares minimizer
  double rel_diff = 0.0;
  bool jd_not_worse = true;        // ||By - y^H B y y|| <= ||By - y/(nu - sigma)||
};
OptimalAlphaResult check_optimal_alpha(const AnalysisProbe& p);

struct SepContinuityResult {
  double relres = 0.0;  // ||A y - nu y|| / ||A||
  double sep_sira = 0.0;
  double sep_jd = 0.0;
  double rel_diff = 0.0;
};
SepContinuityResult check_sep_continuity(const AnalysisProbe& p);

// Randomized suites.

struct CheckStats {
  std::string name;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  double max_residual = 0.0;  // identities: max residual; inequalities: max lhs/rhs
  double tolerance = 0.0;
};

struct SuiteReport {
  std::string name;
  std::size_t probes = 0;
  double seconds = 0.0;
  std::vector<CheckStats> checks;

  bool passed() const;
  const CheckStats* find(const std::string& check) const;
};

struct SuiteOptions {
  std::size_t probes = 500;
  std::uint64_t seed = 1;
  std::vector<std::size_t> sizes{40, 80, 160};
};

/// Angle identity, one-step and telescoped sine products, SIRA/JD equivalence.
SuiteReport run_identity_suite(const SuiteOptions& opts);
/// Error bounds, sep lemma, tau bounds, residual sandwiches, projection bounds,
/// optimal shift, sep continuity on near-converged probes.
SuiteReport run_inequality_suite(const SuiteOptions& opts);
/// tau = 0.01 probes (random and adversarial f): ratio in [0.99, 1.01].
SuiteReport run_tau_calibration(const SuiteOptions& opts);

std::string format_report(const SuiteReport& r);

}  // namespace sirajd::theory
