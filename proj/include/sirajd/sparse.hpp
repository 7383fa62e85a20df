#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sirajd/vector.hpp"

namespace sirajd {

/// Raised by the Matrix Market reader; the message carries the offending line.
class MalformedInputError : public std::runtime_error {
 public:
  MalformedInputError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Square complex matrix in compressed sparse row form.
///
/// Columns are strictly increasing inside every row and duplicates are summed at
/// construction, so the product kernel always accumulates in the same order.
/// The object is immutable once built; the cached 1-norm is computed eagerly.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    Complex value;
  };

  SparseMatrix() = default;

  /// Validates the CSR arrays; throws DimensionError / std::invalid_argument.
  SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, Vector values);

  /// Builds from unsorted triplets, summing duplicates.
  static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(ConstVectorView d);

  std::size_t size() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const Vector& values() const noexcept { return values_; }

  /// Entry (i, j), zero if not stored.
  Complex at(std::size_t i, std::size_t j) const;

  /// Maximum absolute column sum.
  double one_norm() const noexcept { return one_norm_; }

 private:
  void validate() const;

  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  Vector values_;
  double one_norm_ = 0.0;
};

/// y = A x.
Vector spmv(const SparseMatrix& a, ConstVectorView x);
void spmv(const SparseMatrix& a, ConstVectorView x, VectorView y);

inline double one_norm(const SparseMatrix& a) { return a.one_norm(); }

/// The forward operator A - sigma I; the shifted matrix is never materialized.
class ShiftedOperator {
 public:
  ShiftedOperator(const SparseMatrix& a, Complex shift) : a_(&a), shift_(shift) {}

  std::size_t size() const noexcept { return a_->size(); }
  Complex shift() const noexcept { return shift_; }
  const SparseMatrix& matrix() const noexcept { return *a_; }

  void apply(ConstVectorView x, VectorView y) const;
  Vector apply(ConstVectorView x) const;

 private:
  const SparseMatrix* a_;
  Complex shift_;
};

/// Reads a Matrix Market file (coordinate or array; real, integer or complex;
/// general, symmetric, skew-symmetric or hermitian) and returns the fully
/// expanded square matrix.
SparseMatrix mm_load(const std::filesystem::path& path);
SparseMatrix mm_parse(std::istream& in);

}  // namespace sirajd
