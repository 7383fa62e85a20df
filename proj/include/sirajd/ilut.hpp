#pragma once

#include <cstddef>
#include <stdexcept>

#include "sirajd/sparse.hpp"
#include "sirajd/vector.hpp"

namespace sirajd {

class ZeroPivotError : public std::runtime_error {
 public:
  explicit ZeroPivotError(std::size_t row)
      : std::runtime_error("ilut_factor: zero pivot in row " + std::to_string(row)), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class NearSingularProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Threshold incomplete LU factors of A - sigma I.
///
/// `lower` holds the strictly lower part of a unit lower triangular L;
/// `upper` holds U including its diagonal.
struct IlutFactors {
  SparseMatrix lower;
  SparseMatrix upper;
  std::vector<std::size_t> diag_pos;  // position of U(i,i) in upper.values()
  double droptol = 0.0;
  Complex shift{0.0, 0.0};

  std::size_t size() const noexcept { return upper.size(); }
  std::size_t fill() const noexcept { return lower.nnz() + upper.nnz(); }
};

/// Row-wise ILUT without pivoting. An entry of the working row is dropped when
/// its magnitude is below droptol * ||row i of (A - sigma I)||_2; the diagonal
/// of U is always kept. Throws ZeroPivotError on an exactly zero pivot.
IlutFactors ilut_factor(const SparseMatrix& a, Complex shift, double droptol);

/// z = U^{-1} L^{-1} w.
Vector precond_solve(const IlutFactors& m, ConstVectorView w);
void precond_solve(const IlutFactors& m, ConstVectorView w, VectorView z);

/// Preconditioner for the correction equation: the restriction of
/// (I - y y^H) M (I - y y^H) to the orthogonal complement of y.
///
/// M^{-1} y and y^H M^{-1} y are computed once at construction.
class ProjectedPreconditioner {
 public:
  ProjectedPreconditioner(const IlutFactors& base, ConstVectorView y);

  const Vector& minv_y() const noexcept { return minv_y_; }
  Complex denominator() const noexcept { return y_minv_y_; }
  const Vector& y() const noexcept { return y_; }

  void apply(ConstVectorView w, VectorView z) const;
  Vector apply(ConstVectorView w) const;

 private:
  const IlutFactors* base_;
  Vector y_;
  Vector minv_y_;
  Complex y_minv_y_;
};

inline Vector projected_precond_solve(const ProjectedPreconditioner& p, ConstVectorView w) { return p.apply(w); }

}  // namespace sirajd
