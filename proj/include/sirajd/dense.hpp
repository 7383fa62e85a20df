#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sirajd/sparse.hpp"
#include "sirajd/vector.hpp"

namespace sirajd {

/// Column-major complex dense matrix. Used for the basis V (n x m) and the
/// projected matrix H (m x m).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const Vector& values() const noexcept { return values_; }

  Complex& operator()(std::size_t i, std::size_t j) { return values_[j * rows_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return values_[j * rows_ + i]; }

  ConstVectorView col(std::size_t j) const { return {values_.data() + j * rows_, rows_}; }
  VectorView col(std::size_t j) { return {values_.data() + j * rows_, rows_}; }

  /// Appends a column of length rows() (an empty matrix adopts the length).
  void append_column(ConstVectorView c);

  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector values_;
};

/// Matrix-vector helpers on a basis V (n x m).
Vector multiply(const DenseMatrix& v, ConstVectorView z);          // V z
Vector adjoint_multiply(const DenseMatrix& v, ConstVectorView x);  // V^H x

class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenpairs of a small projected matrix, sorted by distance to the target.
///
/// values[0] is the Ritz value nearest the target; ties in |nu - target| are
/// broken by ascending imaginary part, then ascending real part. `ordering`
/// maps sorted position to the index the eigensolver produced.
struct RitzSet {
  Vector values;
  DenseMatrix vectors;
  std::vector<std::size_t> ordering;
  Complex target{0.0, 0.0};

  std::size_t size() const noexcept { return values.size(); }
};

/// Sorts values/vectors by distance to `target` with the tie convention above.
void order_by_target(RitzSet& ritz, Complex target);

/// Full eigendecomposition of a general complex matrix: Householder reduction to
/// Hessenberg form, shifted QR to Schur form, back-substitution for the
/// eigenvectors of the triangular factor. Eigenvectors have unit 2-norm.
/// Throws ConvergenceFailure if deflation takes more than 30*m sweeps.
RitzSet small_eig(const DenseMatrix& h, Complex target = {0.0, 0.0}, std::size_t max_dim = 200);

struct OrthoResult {
  Vector v;                 // normalized (I - V V^H) u; empty on breakdown
  Vector coefficients;      // V^H u accumulated over both passes
  double norm_after = 0.0;  // ||(I - V V^H) u|| before normalization
  bool breakdown = false;
};

/// Modified Gram-Schmidt against the columns of V with one full second pass.
/// Breakdown is reported when norm_after <= rel_breakdown * ||u||.
OrthoResult orthonormalize_against(const DenseMatrix& v_basis, ConstVectorView u, double rel_breakdown = 1e-14);

/// sin of the angle between span(V) and y; throws std::domain_error for y = 0.
double subspace_sine(const DenseMatrix& v_basis, ConstVectorView y);

/// sin of the angle between two nonzero vectors.
double vector_sine(ConstVectorView a, ConstVectorView b);

/// Bordered projected matrix for [V v_new]; recomputes A V column by column.
DenseMatrix rayleigh_update(const DenseMatrix& h, const DenseMatrix& v_basis, const SparseMatrix& a,
                            ConstVectorView v_new);

/// Orthonormal basis V together with AV and H = V^H A V, grown one column at a
/// time with a single product by A per column.
class ProjectedBasis {
 public:
  explicit ProjectedBasis(const SparseMatrix& a) : a_(&a) {}

  /// v_new must be unit and orthogonal to the current basis.
  void append(ConstVectorView v_new);
  void clear();

  std::size_t dim() const noexcept { return v_.cols(); }
  const DenseMatrix& basis() const noexcept { return v_; }
  const DenseMatrix& image() const noexcept { return av_; }
  const DenseMatrix& projected() const noexcept { return h_; }

 private:
  const SparseMatrix* a_;
  DenseMatrix v_;
  DenseMatrix av_;
  DenseMatrix h_;
};

}  // namespace sirajd
