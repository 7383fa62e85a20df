#include "sirajd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sirajd {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::append_column(ConstVectorView c) {
  if (cols_ == 0 && rows_ == 0) rows_ = c.size();
  require_same_size(rows_, c.size(), "append_column");
  values_.insert(values_.end(), c.begin(), c.end());
  ++cols_;
}

double DenseMatrix::frobenius_norm() const { return norm2(values_); }

Vector multiply(const DenseMatrix& v, ConstVectorView z) {
  require_same_size(v.cols(), z.size(), "multiply");
  Vector out(v.rows(), Complex{0.0, 0.0});
  for (std::size_t j = 0; j < v.cols(); ++j) axpy(z[j], v.col(j), out);
  return out;
}

Vector adjoint_multiply(const DenseMatrix& v, ConstVectorView x) {
  require_same_size(v.rows(), x.size(), "adjoint_multiply");
  Vector out(v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) out[j] = dot(v.col(j), x);
  return out;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Rotation G = [c s; -conj(s) c] with G [x; y] = [r; 0].
struct Givens {
  double c;
  Complex s;
};

Givens make_givens(Complex x, Complex y) {
  if (y == Complex{0.0, 0.0}) return {1.0, {0.0, 0.0}};
  if (x == Complex{0.0, 0.0}) return {0.0, {1.0, 0.0}};
  const double ax = std::abs(x);
  const double nrm = std::hypot(ax, std::abs(y));
  return {ax / nrm, (x / ax) * std::conj(y) / nrm};
}

// rows k, k+1 of m, columns [c0, c1)
void rotate_rows(DenseMatrix& m, std::size_t k, const Givens& g, std::size_t c0, std::size_t c1) {
  for (std::size_t j = c0; j < c1; ++j) {
    const Complex a = m(k, j);
    const Complex b = m(k + 1, j);
    m(k, j) = g.c * a + g.s * b;
    m(k + 1, j) = -std::conj(g.s) * a + g.c * b;
  }
}

// columns k, k+1 of m (right-multiplication by G^H), rows [r0, r1)
void rotate_cols(DenseMatrix& m, std::size_t k, const Givens& g, std::size_t r0, std::size_t r1) {
  for (std::size_t i = r0; i < r1; ++i) {
    const Complex a = m(i, k);
    const Complex b = m(i, k + 1);
    m(i, k) = g.c * a + std::conj(g.s) * b;
    m(i, k + 1) = -g.s * a + g.c * b;
  }
}

// Householder reduction to upper Hessenberg form, q accumulates the similarity.
void hessenberg(DenseMatrix& h, DenseMatrix& q) {
  const std::size_t n = h.rows();
  Vector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm = std::hypot(xnorm, std::abs(h(i, k)));
    if (xnorm == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex{1.0, 0.0} : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    std::fill(v.begin(), v.end(), Complex{0.0, 0.0});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm == 0.0) continue;
    for (auto& e : v) e /= vnorm;
    // h <- (I - 2 v v^H) h
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{0.0, 0.0};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * s;
    }
    // h <- h (I - 2 v v^H), q <- q (I - 2 v v^H)
    for (DenseMatrix* m : {&h, &q}) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex s{0.0, 0.0};
        for (std::size_t j = k + 1; j < n; ++j) s += (*m)(i, j) * v[j];
        for (std::size_t j = k + 1; j < n; ++j) (*m)(i, j) -= 2.0 * s * std::conj(v[j]);
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
  const Complex half_tr = 0.5 * (a + d);
  const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  const Complex l1 = half_tr + disc;
  const Complex l2 = half_tr - disc;
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

// Shifted QR on a Hessenberg matrix, reducing it to upper triangular Schur form.
void schur(DenseMatrix& t, DenseMatrix& z) {
  const std::size_t n = t.rows();
  if (n <= 1) return;
  const std::size_t budget = 30 * n;
  std::size_t sweeps = 0;
  std::size_t since_deflation = 0;
  const double tnorm = std::max(t.frobenius_norm(), std::numeric_limits<double>::min());

  std::size_t hi = n - 1;
  while (hi > 0) {
    std::size_t l = hi;
    while (l > 0) {
      double s = abs1(t(l - 1, l - 1)) + abs1(t(l, l));
      if (s == 0.0) s = tnorm;
      if (abs1(t(l, l - 1)) <= kEps * s) {
        t(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++sweeps > budget) throw ConvergenceFailure("small_eig: QR iteration failed to deflate");
    ++since_deflation;

    Complex mu;
    if (since_deflation % 10 == 0) {
      mu = t(hi, hi) + 0.75 * std::abs(t(hi, hi - 1));  // exceptional shift
    } else {
      mu = wilkinson_shift(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
    }

    for (std::size_t k = l; k < hi; ++k) {
      Givens g;
      if (k == l) {
        g = make_givens(t(l, l) - mu, t(l + 1, l));
      } else {
        g = make_givens(t(k, k - 1), t(k + 1, k - 1));
      }
      rotate_rows(t, k, g, k == l ? l : k - 1, n);
      rotate_cols(t, k, g, 0, std::min(k + 3, hi + 1));
      rotate_cols(z, k, g, 0, n);
      if (k > l) t(k + 1, k - 1) = 0.0;
    }
  }
}

bool target_less(Complex a, Complex b, Complex target) {
  const double da = std::abs(a - target);
  const double db = std::abs(b - target);
  if (da != db) return da < db;
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

}  // namespace

RitzSet small_eig(const DenseMatrix& h, Complex target, std::size_t max_dim) {
  const std::size_t m = h.rows();
  if (m == 0 || h.cols() != m) throw DimensionError("small_eig: matrix must be square and nonempty");
  if (m > max_dim) throw DimensionError("small_eig: matrix exceeds the configured maximum dimension");

  DenseMatrix t = h;
  DenseMatrix z = DenseMatrix::identity(m);
  hessenberg(t, z);
  schur(t, z);

  // eigenvectors of the triangular factor
  const double small = std::max(kEps * t.frobenius_norm(), std::numeric_limits<double>::min());
  DenseMatrix x(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    x(k, k) = 1.0;
    const Complex lambda = t(k, k);
    for (std::size_t ii = k; ii-- > 0;) {
      Complex s{0.0, 0.0};
      for (std::size_t j = ii + 1; j <= k; ++j) s += t(ii, j) * x(j, k);
      Complex d = t(ii, ii) - lambda;
      if (std::abs(d) < small) d = small;
      x(ii, k) = -s / d;
    }
  }

  Vector values(m);
  DenseMatrix vectors(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    values[k] = t(k, k);
    Vector col(m, Complex{0.0, 0.0});
    for (std::size_t j = 0; j <= k; ++j) axpy(x(j, k), z.col(j), col);
    const double nrm = norm2(col);
    for (std::size_t i = 0; i < m; ++i) vectors(i, k) = col[i] / nrm;
  }

  RitzSet out{std::move(values), std::move(vectors), {}, target};
  out.ordering.resize(m);
  std::iota(out.ordering.begin(), out.ordering.end(), std::size_t{0});
  order_by_target(out, target);
  return out;
}

void order_by_target(RitzSet& ritz, Complex target) {
  const std::size_t m = ritz.values.size();
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return target_less(ritz.values[a], ritz.values[b], target);
  });
  Vector values(m);
  DenseMatrix vectors(ritz.vectors.rows(), m);
  std::vector<std::size_t> ordering(m);
  for (std::size_t p = 0; p < m; ++p) {
    values[p] = ritz.values[perm[p]];
    ordering[p] = ritz.ordering.empty() ? perm[p] : ritz.ordering[perm[p]];
    const auto src = ritz.vectors.col(perm[p]);
    std::copy(src.begin(), src.end(), vectors.col(p).begin());
  }
  ritz.values = std::move(values);
  ritz.vectors = std::move(vectors);
  ritz.ordering = std::move(ordering);
  ritz.target = target;
}

OrthoResult orthonormalize_against(const DenseMatrix& v_basis, ConstVectorView u, double rel_breakdown) {
  if (v_basis.cols() > 0) require_same_size(v_basis.rows(), u.size(), "orthonormalize_against");
  OrthoResult res;
  const double unorm = norm2(u);
  Vector w(u.begin(), u.end());
  res.coefficients.assign(v_basis.cols(), Complex{0.0, 0.0});
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < v_basis.cols(); ++j) {
      const auto vj = v_basis.col(j);
      const Complex c = dot(vj, w);
      res.coefficients[j] += c;
      axpy(-c, vj, w);
    }
  }
  res.norm_after = norm2(w);
  if (unorm == 0.0 || res.norm_after <= rel_breakdown * unorm) {
    res.breakdown = true;
    return res;
  }
  scale(1.0 / res.norm_after, w);
  res.v = std::move(w);
  return res;
}

double subspace_sine(const DenseMatrix& v_basis, ConstVectorView y) {
  const double ynorm = norm2(y);
  if (ynorm == 0.0) throw std::domain_error("subspace_sine: zero vector");
  Vector w(y.begin(), y.end());
  if (v_basis.cols() > 0) {
    const Vector c = adjoint_multiply(v_basis, y);
    const Vector p = multiply(v_basis, c);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= p[i];
  }
  return std::clamp(norm2(w) / ynorm, 0.0, 1.0);
}

double vector_sine(ConstVectorView a, ConstVectorView b) {
  const double bn = norm2(b);
  if (bn == 0.0) throw std::domain_error("vector_sine: zero vector");
  DenseMatrix basis;
  Vector unit(b.begin(), b.end());
  scale(1.0 / bn, unit);
  basis.append_column(unit);
  return subspace_sine(basis, a);
}

DenseMatrix rayleigh_update(const DenseMatrix& h, const DenseMatrix& v_basis, const SparseMatrix& a,
                            ConstVectorView v_new) {
  const std::size_t m = v_basis.cols();
  require_same_size(h.rows(), m, "rayleigh_update");
  require_same_size(h.cols(), m, "rayleigh_update");
  require_same_size(a.size(), v_new.size(), "rayleigh_update");
  DenseMatrix out(m + 1, m + 1);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) out(i, j) = h(i, j);
  const Vector av_new = spmv(a, v_new);
  for (std::size_t i = 0; i < m; ++i) out(i, m) = dot(v_basis.col(i), av_new);
  for (std::size_t j = 0; j < m; ++j) out(m, j) = dot(v_new, spmv(a, v_basis.col(j)));
  out(m, m) = dot(v_new, av_new);
  return out;
}

void ProjectedBasis::append(ConstVectorView v_new) {
  const std::size_t m = dim();
  const Vector av_new = spmv(*a_, v_new);
  DenseMatrix h(m + 1, m + 1);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) h(i, j) = h_(i, j);
  for (std::size_t i = 0; i < m; ++i) h(i, m) = dot(v_.col(i), av_new);
  for (std::size_t j = 0; j < m; ++j) h(m, j) = dot(v_new, av_.col(j));
  h(m, m) = dot(v_new, av_new);
  h_ = std::move(h);
  v_.append_column(v_new);
  av_.append_column(av_new);
}

void ProjectedBasis::clear() {
  v_ = DenseMatrix();
  av_ = DenseMatrix();
  h_ = DenseMatrix();
}

}  // namespace sirajd
