#include "sirajd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sirajd {

double norm2(ConstVectorView x) {
  // scaled accumulation, avoids overflow for huge entries
  double scale = 0.0;
  double ssq = 1.0;
  for (const auto& z : x) {
    for (double c : {z.real(), z.imag()}) {
      if (c == 0.0) continue;
      const double a = std::abs(c);
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, Vector values)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  validate();
  std::vector<double> colsum(n_, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) colsum[col_indices_[k]] += std::abs(values_[k]);
  one_norm_ = colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

void SparseMatrix::validate() const {
  if (n_ == 0) throw DimensionError("SparseMatrix: dimension must be at least 1");
  if (row_offsets_.size() != n_ + 1) throw DimensionError("SparseMatrix: row_offsets must have n+1 entries");
  if (row_offsets_.front() != 0 || row_offsets_.back() != values_.size())
    throw std::invalid_argument("SparseMatrix: row_offsets must start at 0 and end at nnz");
  if (col_indices_.size() != values_.size())
    throw DimensionError("SparseMatrix: col_indices and values differ in length");
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1])
      throw std::invalid_argument("SparseMatrix: row_offsets must be nondecreasing");
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= n_) throw std::invalid_argument("SparseMatrix: column index out of range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw std::invalid_argument("SparseMatrix: columns must be strictly increasing within a row");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= n || t.col >= n) throw DimensionError("from_triplets: index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  Vector vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  Vector d(n, Complex{1.0, 0.0});
  return diagonal(d);
}

SparseMatrix SparseMatrix::diagonal(ConstVectorView d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrix(n, std::move(offsets), std::move(cols), Vector(d.begin(), d.end()));
}

Complex SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_.at(i));
  const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_.at(i + 1));
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return {0.0, 0.0};
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

void spmv(const SparseMatrix& a, ConstVectorView x, VectorView y) {
  require_same_size(a.size(), x.size(), "spmv");
  require_same_size(a.size(), y.size(), "spmv");
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    Complex s{0.0, 0.0};
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

Vector spmv(const SparseMatrix& a, ConstVectorView x) {
  Vector y(a.size());
  spmv(a, x, y);
  return y;
}

void ShiftedOperator::apply(ConstVectorView x, VectorView y) const {
  spmv(*a_, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= shift_ * x[i];
}

Vector ShiftedOperator::apply(ConstVectorView x) const {
  Vector y(size());
  apply(x, y);
  return y;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

enum class Field { Real, Complex };
enum class Symmetry { General, Symmetric, Skew, Hermitian };

struct Header {
  bool coordinate = true;
  Field field = Field::Real;
  Symmetry symmetry = Symmetry::General;
};

Header parse_banner(const std::string& line) {
  std::istringstream ss(line);
  std::string banner, object, format, field, symmetry;
  ss >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw MalformedInputError("missing %%MatrixMarket banner", 1);
  if (lower(object) != "matrix") throw MalformedInputError("unsupported object '" + object + "'", 1);
  Header h;
  format = lower(format);
  if (format == "coordinate") {
    h.coordinate = true;
  } else if (format == "array") {
    h.coordinate = false;
  } else {
    throw MalformedInputError("unsupported format '" + format + "'", 1);
  }
  field = lower(field);
  if (field == "real" || field == "integer" || field == "double") {
    h.field = Field::Real;
  } else if (field == "complex") {
    h.field = Field::Complex;
  } else if (field == "pattern") {
    throw MalformedInputError("pattern matrices carry no values", 1);
  } else {
    throw MalformedInputError("unsupported field '" + field + "'", 1);
  }
  symmetry = lower(symmetry);
  if (symmetry == "general") {
    h.symmetry = Symmetry::General;
  } else if (symmetry == "symmetric") {
    h.symmetry = Symmetry::Symmetric;
  } else if (symmetry == "skew-symmetric") {
    h.symmetry = Symmetry::Skew;
  } else if (symmetry == "hermitian") {
    h.symmetry = Symmetry::Hermitian;
  } else {
    throw MalformedInputError("unsupported symmetry '" + symmetry + "'", 1);
  }
  return h;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Complex read_value(std::istringstream& ss, Field field, std::size_t lineno) {
  double re = 0.0;
  double im = 0.0;
  if (!(ss >> re)) throw MalformedInputError("expected a numeric value", lineno);
  if (field == Field::Complex && !(ss >> im)) throw MalformedInputError("expected an imaginary part", lineno);
  return {re, im};
}

void push_with_symmetry(std::vector<SparseMatrix::Triplet>& out, std::size_t i, std::size_t j, Complex v,
                        Symmetry sym) {
  out.push_back({i, j, v});
  if (i == j) return;
  switch (sym) {
    case Symmetry::General:
      break;
    case Symmetry::Symmetric:
      out.push_back({j, i, v});
      break;
    case Symmetry::Skew:
      out.push_back({j, i, -v});
      break;
    case Symmetry::Hermitian:
      out.push_back({j, i, std::conj(v)});
      break;
  }
}

}  // namespace

SparseMatrix mm_parse(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw MalformedInputError("empty input", 1);
  ++lineno;
  const Header h = parse_banner(line);

  // size line
  std::size_t rows = 0, cols = 0, entries = 0;
  for (;;) {
    if (!std::getline(in, line)) throw MalformedInputError("missing size line", lineno + 1);
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols)) throw MalformedInputError("malformed size line", lineno);
    if (h.coordinate && !(ss >> entries)) throw MalformedInputError("malformed size line", lineno);
    break;
  }
  if (rows != cols) {
    throw DimensionError("matrix is not square (" + std::to_string(rows) + " x " + std::to_string(cols) + ")");
  }
  if (rows == 0) throw DimensionError("matrix has zero dimension");
  const std::size_t n = rows;

  std::vector<SparseMatrix::Triplet> triplets;
  if (h.coordinate) {
    triplets.reserve(h.symmetry == Symmetry::General ? entries : 2 * entries);
    std::size_t seen = 0;
    while (seen < entries && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      std::istringstream ss(line);
      long long i = 0, j = 0;
      if (!(ss >> i >> j)) throw MalformedInputError("expected row and column indices", lineno);
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
        throw MalformedInputError("index out of range", lineno);
      const Complex v = read_value(ss, h.field, lineno);
      push_with_symmetry(triplets, static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v,
                         h.symmetry);
      ++seen;
    }
    if (seen < entries) throw MalformedInputError("unexpected end of file", lineno + 1);
  } else {
    // column-major; symmetric variants list the lower triangle only
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t first = h.symmetry == Symmetry::General ? 0 : (h.symmetry == Symmetry::Skew ? j + 1 : j);
      for (std::size_t i = first; i < n; ++i) {
        for (;;) {
          if (!std::getline(in, line)) throw MalformedInputError("unexpected end of file", lineno + 1);
          ++lineno;
          if (!blank_or_comment(line)) break;
        }
        std::istringstream ss(line);
        const Complex v = read_value(ss, h.field, lineno);
        if (v != Complex{0.0, 0.0}) push_with_symmetry(triplets, i, j, v, h.symmetry);
      }
    }
  }
  return SparseMatrix::from_triplets(n, std::move(triplets));
}

SparseMatrix mm_load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path.string() + "'");
  return mm_parse(in);
}

}  // namespace sirajd
