#include "sirajd/krylov.hpp"

#include <cmath>
#include <limits>

#include "sirajd/dense.hpp"

namespace sirajd {

LinearOperator LinearOperator::identity(std::size_t n) {
  return {n, [](ConstVectorView x, VectorView y) { std::copy(x.begin(), x.end(), y.begin()); }};
}

LinearOperator make_operator(const ShiftedOperator& op) {
  return {op.size(), [op](ConstVectorView x, VectorView y) { op.apply(x, y); }};
}

LinearOperator make_operator(const IlutFactors& m) {
  return {m.size(), [&m](ConstVectorView x, VectorView y) { precond_solve(m, x, y); }};
}

LinearOperator make_operator(const ProjectedPreconditioner& p) {
  return {p.y().size(), [&p](ConstVectorView x, VectorView y) { p.apply(x, y); }};
}

LinearOperator jd_projected_operator(const SparseMatrix& a, Complex shift, ConstVectorView y) {
  require_same_size(a.size(), y.size(), "jd_projected_operator");
  Vector yy(y.begin(), y.end());
  const ShiftedOperator shifted(a, shift);
  return {a.size(), [shifted, yy = std::move(yy)](ConstVectorView x, VectorView out) {
            Vector px(x.begin(), x.end());
            project_out(yy, px);
            shifted.apply(px, out);
            project_out(yy, out);
          }};
}

namespace {

struct Rotation {
  double c = 1.0;
  Complex s{0.0, 0.0};
};

Rotation make_rotation(Complex x, Complex y) {
  if (y == Complex{0.0, 0.0}) return {};
  if (x == Complex{0.0, 0.0}) return {0.0, {1.0, 0.0}};
  const double ax = std::abs(x);
  const double nrm = std::hypot(ax, std::abs(y));
  return {ax / nrm, (x / ax) * std::conj(y) / nrm};
}

void rotate(const Rotation& g, Complex& a, Complex& b) {
  const Complex t = g.c * a + g.s * b;
  b = -std::conj(g.s) * a + g.c * b;
  a = t;
}

}  // namespace

InnerSolveReport gmres_right(const LinearOperator& op, ConstVectorView b, const LinearOperator& m_inv, double tol,
                             const GmresOptions& opts) {
  const std::size_t n = op.dim;
  require_same_size(n, b.size(), "gmres_right");
  require_same_size(n, m_inv.dim, "gmres_right");
  if (opts.restart == 0) throw std::invalid_argument("gmres_right: restart must be positive");
  if (!(tol > 0.0 && tol <= 1.0)) throw std::invalid_argument("gmres_right: tol must lie in (0, 1]");
  const double bnorm = norm2(b);
  if (bnorm == 0.0) throw std::invalid_argument("gmres_right: zero right-hand side");

  const std::size_t m = opts.restart;
  InnerSolveReport rep;
  Vector x(n, Complex{0.0, 0.0});
  Vector r(b.begin(), b.end());
  double rnorm = bnorm;
  Vector best_x = x;
  double best_relres = 1.0;

  std::vector<Vector> basis;
  std::vector<Vector> hcols;  // column j has j+2 entries
  std::vector<Rotation> rots;
  Vector g, z(n), w(n), ax(n);

  while (rep.iterations < opts.maxit) {
    basis.assign(1, r);
    if (opts.constrain) opts.constrain(basis[0]);
    scale(1.0 / norm2(basis[0]), basis[0]);
    if (opts.on_basis_vector) opts.on_basis_vector(basis[0]);
    hcols.clear();
    rots.clear();
    g.assign(1, Complex{rnorm, 0.0});
    rep.cycle_starts.push_back(rep.history.size());

    bool happy = false;
    for (std::size_t j = 0; j < m && rep.iterations < opts.maxit; ++j) {
      m_inv.apply(basis[j], z);
      op.apply(z, w);
      ++rep.iterations;

      Vector h(j + 2, Complex{0.0, 0.0});
      const double before = norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        const Complex c = dot(basis[i], w);
        h[i] += c;
        axpy(-c, basis[i], w);
      }
      double after = norm2(w);
      if (after < 0.7 * before) {
        for (std::size_t i = 0; i <= j; ++i) {
          const Complex c = dot(basis[i], w);
          h[i] += c;
          axpy(-c, basis[i], w);
        }
        after = norm2(w);
      }
      if (opts.constrain) {
        opts.constrain(w);
        after = norm2(w);
      }
      h[j + 1] = after;

      for (std::size_t i = 0; i < j; ++i) rotate(rots[i], h[i], h[i + 1]);
      const Rotation gj = make_rotation(h[j], h[j + 1]);
      rotate(gj, h[j], h[j + 1]);
      rots.push_back(gj);
      g.push_back(Complex{0.0, 0.0});
      rotate(gj, g[j], g[j + 1]);
      hcols.push_back(std::move(h));

      const double est = std::abs(g[j + 1]) / bnorm;
      rep.history.push_back(est);
      rep.estimated_relres = est;

      if (after <= 1e-14 * before || after == 0.0) {
        happy = true;
        break;
      }
      Vector next = w;
      scale(1.0 / after, next);
      if (opts.on_basis_vector) opts.on_basis_vector(next);
      basis.push_back(std::move(next));
      if (est <= tol) break;
    }

    // least squares update x += M^{-1} V y
    const std::size_t k = hcols.size();
    if (k > 0) {
      Vector y(k);
      for (std::size_t i = k; i-- > 0;) {
        Complex s = g[i];
        for (std::size_t jj = i + 1; jj < k; ++jj) s -= hcols[jj][i] * y[jj];
        y[i] = s / hcols[i][i];
      }
      Vector vy(n, Complex{0.0, 0.0});
      for (std::size_t i = 0; i < k; ++i) axpy(y[i], basis[i], vy);
      m_inv.apply(vy, z);
      axpy(1.0, z, x);
    }

    op.apply(x, ax);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    rnorm = norm2(r);
    const double relres = rnorm / bnorm;
    if (relres < best_relres || k == 0) {
      best_relres = relres;
      best_x = x;
    }
    if (relres <= tol) {
      rep.converged = true;
      break;
    }
    if (rnorm == 0.0 || (happy && k == 0)) break;
  }

  rep.solution = std::move(best_x);
  rep.relres = best_relres;
  return rep;
}

}  // namespace sirajd
