#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sirajd/ilut.hpp"
#include "sirajd/sparse.hpp"
#include "sirajd/vector.hpp"

namespace sirajd {

/// Abstract linear action v -> Op v of dimension dim.
struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(ConstVectorView, VectorView)> apply;

  Vector operator()(ConstVectorView x) const {
    Vector y(dim);
    apply(x, y);
    return y;
  }

  static LinearOperator identity(std::size_t n);
};

LinearOperator make_operator(const ShiftedOperator& op);
LinearOperator make_operator(const IlutFactors& m);
LinearOperator make_operator(const ProjectedPreconditioner& p);

/// (I - y y^H)(A - sigma I)(I - y y^H); y is copied and must be unit.
LinearOperator jd_projected_operator(const SparseMatrix& a, Complex shift, ConstVectorView y);

struct GmresOptions {
  std::size_t restart = 30;
  std::size_t maxit = 300;
  /// Called with every Arnoldi basis vector as it is generated.
  std::function<void(ConstVectorView)> on_basis_vector;
  /// Applied in place to every new basis vector before normalization, e.g. a
  /// projector that keeps the Krylov space inside a subspace.
  std::function<void(VectorView)> constrain;
};

struct InnerSolveReport {
  Vector solution;
  double relres = 0.0;            // ||b - Op x|| / ||b|| recomputed from `solution`
  double estimated_relres = 0.0;  // last Arnoldi recurrence estimate
  std::size_t iterations = 0;     // Arnoldi steps, one Op application each
  bool converged = false;
  /// Recurrence estimates after each Arnoldi step (relative to ||b||).
  std::vector<double> history;
  /// Index in `history` where each restart cycle begins.
  std::vector<std::size_t> cycle_starts;
};

/// Right-preconditioned restarted GMRES from the zero vector.
///
/// Convergence is declared only on the true relative residual, which is
/// checked whenever the recurrence estimate drops below tol and at every
/// restart boundary. A non-converged report carries the iterate with the
/// smallest true residual seen.
InnerSolveReport gmres_right(const LinearOperator& op, ConstVectorView b, const LinearOperator& m_inv, double tol,
                             const GmresOptions& opts = {});

}  // namespace sirajd
