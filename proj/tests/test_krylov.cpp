#include <doctest.h>

#include "oracle.hpp"
#include "sirajd/krylov.hpp"

using namespace sirajd;
using namespace testutil;

namespace {

double true_relres(const LinearOperator& op, const Vector& b, const Vector& x) {
  Vector r = op(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r) / norm2(b);
}

}  // namespace

TEST_CASE("gmres: identity operator converges in one step") {
  std::mt19937_64 rng(1);
  const Vector b = random_vector(30, rng);
  const auto id = LinearOperator::identity(30);
  const InnerSolveReport r = gmres_right(id, b, id, 1e-10);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(rel_err(to_eigen(r.solution), to_eigen(b)) <= 1e-14);
}

TEST_CASE("gmres: exact preconditioner converges in 1-2 steps") {
  std::mt19937_64 rng(2);
  const auto a = random_sparse(100, 0.05, rng, 5.0);
  const Complex sigma{0.2, 0.0};
  const IlutFactors f = ilut_factor(a, sigma, 0.0);
  const Vector b = random_vector(100, rng);
  const InnerSolveReport r = gmres_right(make_operator(ShiftedOperator(a, sigma)), b, make_operator(f), 1e-10);
  CHECK(r.converged);
  CHECK(r.iterations >= 1);
  CHECK(r.iterations <= 2);
}

TEST_CASE("gmres: random well-conditioned system against dense LU") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = random_sparse(100, 0.05, rng, 8.0);
    const Vector b = random_vector(100, rng);
    const ShiftedOperator op(a, 0.0);
    const InnerSolveReport r = gmres_right(make_operator(op), b, LinearOperator::identity(100), 1e-8);
    CHECK(r.converged);
    CHECK(r.relres <= 1e-8);
    const CVec ref = to_dense(a).partialPivLu().solve(to_eigen(b));
    CHECK(rel_err(to_eigen(r.solution), ref) <= 1e-6);
  }
}

TEST_CASE("gmres: true residual discipline and monotone history") {
  std::mt19937_64 rng(4);
  const auto a = random_sparse(150, 0.04, rng, 1.0);
  const Complex sigma{0.0, 0.3};
  const auto op = make_operator(ShiftedOperator(a, sigma));
  const IlutFactors f = ilut_factor(a, sigma, 0.1);
  for (double tol : {1e-2, 1e-6, 1e-12}) {
    GmresOptions opts;
    opts.restart = 10;
    opts.maxit = 60;
    const Vector b = random_vector(150, rng);
    const InnerSolveReport r = gmres_right(op, b, make_operator(f), tol, opts);
    CHECK(std::abs(true_relres(op, b, r.solution) - r.relres) <= 1e-12);
    if (r.converged) CHECK(r.relres <= tol);
    CHECK(r.iterations <= opts.maxit);
    CHECK(r.history.size() == r.iterations);
    for (std::size_t c = 0; c < r.cycle_starts.size(); ++c) {
      const std::size_t lo = r.cycle_starts[c];
      const std::size_t hi = c + 1 < r.cycle_starts.size() ? r.cycle_starts[c + 1] : r.history.size();
      for (std::size_t k = lo + 1; k < hi; ++k) CHECK(r.history[k] <= r.history[k - 1] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("gmres: non-convergence returns the best iterate") {
  std::mt19937_64 rng(5);
  const auto a = random_sparse(200, 0.02, rng);
  const auto op = make_operator(ShiftedOperator(a, 0.0));
  const Vector b = random_vector(200, rng);
  GmresOptions opts;
  opts.restart = 5;
  opts.maxit = 10;
  const InnerSolveReport r = gmres_right(op, b, LinearOperator::identity(200), 1e-12, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.relres <= 1.0);
  CHECK(std::abs(true_relres(op, b, r.solution) - r.relres) <= 1e-12);
  CHECK_THROWS_AS(gmres_right(op, Vector(200), LinearOperator::identity(200), 1e-6), std::invalid_argument);
}

TEST_CASE("jd_projected_operator") {
  std::mt19937_64 rng(6);
  const Vector d{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  const auto diag = SparseMatrix::diagonal(d);
  Vector e1(4);
  e1[0] = 1.0;
  const auto op = jd_projected_operator(diag, {0.5, 0.0}, e1);
  const Vector out = op(Vector(4, Complex{1.0, 0.0}));
  CHECK(out[0] == Complex{0.0, 0.0});
  for (std::size_t i = 1; i < 4; ++i) CHECK(out[i] == d[i] - 0.5);

  const auto a = random_sparse(60, 0.1, rng);
  const Vector y = random_unit(60, rng);
  const Complex sigma{-0.3, 0.8};
  const auto jd = jd_projected_operator(a, sigma, y);
  CHECK(norm2(jd(y)) <= 1e-12);
  const CVec ye = to_eigen(y);
  const CMat p = CMat::Identity(60, 60) - ye * ye.adjoint();
  const CMat ref = p * (to_dense(a) - sigma * CMat::Identity(60, 60)) * p;
  const Vector v = random_vector(60, rng);
  const Vector w = random_vector(60, rng);
  CHECK(rel_err(to_eigen(jd(v)), ref * to_eigen(v)) <= 1e-12);

  Vector comb(60);
  const Complex c1{0.7, -0.2}, c2{-1.3, 0.4};
  for (std::size_t i = 0; i < 60; ++i) comb[i] = c1 * v[i] + c2 * w[i];
  const CVec lin = c1 * to_eigen(jd(v)) + c2 * to_eigen(jd(w));
  CHECK(rel_err(to_eigen(jd(comb)), lin) <= 1e-13);
}

TEST_CASE("gmres on the correction equation stays in y-perp") {
  std::mt19937_64 rng(7);
  const auto a = random_sparse(80, 0.08, rng, 2.0);
  const Complex sigma{0.1, 0.0};
  const Vector y = random_unit(80, rng);
  const IlutFactors f = ilut_factor(a, sigma, 1e-2);
  const ProjectedPreconditioner p(f, y);
  Vector b = random_vector(80, rng);
  project_out(y, b);
  double worst = 0.0;
  GmresOptions opts;
  opts.on_basis_vector = [&](ConstVectorView w) { worst = std::max(worst, std::abs(dot(y, w))); };
  opts.constrain = [&](VectorView w) { project_out(y, w); };
  const InnerSolveReport r = gmres_right(jd_projected_operator(a, sigma, y), b, make_operator(p), 1e-10, opts);
  CHECK(r.converged);
  CHECK(worst <= 1e-10);
  CHECK(std::abs(dot(y, r.solution)) <= 1e-10 * norm2(r.solution));
}
