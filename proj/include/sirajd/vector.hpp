#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirajd {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;
using ConstVectorView = std::span<const Complex>;
using VectorView = std::span<Complex>;

/// Thrown when operand dimensions disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

/// Conjugated inner product x^H y.
inline Complex dot(ConstVectorView x, ConstVectorView y) {
  require_same_size(x.size(), y.size(), "dot");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm2(ConstVectorView x);

inline void axpy(Complex a, ConstVectorView x, VectorView y) {
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(Complex a, VectorView x) {
  for (auto& v : x) v *= a;
}

/// Orthogonal projector I - y y^H applied in place (y must be unit).
inline void project_out(ConstVectorView y, VectorView x) {
  const Complex c = dot(y, x);
  axpy(-c, y, x);
}

}  // namespace sirajd
