#include <doctest.h>

#include "sirajd/tolerance.hpp"

using namespace sirajd;

namespace {

RitzSet ritz_of(std::initializer_list<Complex> values, Complex sigma) {
  RitzSet r;
  r.values = values;
  r.vectors = DenseMatrix::identity(r.values.size());
  order_by_target(r, sigma);
  return r;
}

}  // namespace

TEST_CASE("inner tolerance: first step uses teps") {
  const RitzSet r = ritz_of({1.0}, 0.0);
  const InnerTolerance t = compute_inner_tol(1e-3, r, 0.0, 1.0, 1);
  CHECK(t.eps == 1e-3);
  CHECK_FALSE(t.capped);
}

TEST_CASE("inner tolerance: formula") {
  const RitzSet r = ritz_of({1.0, 2.0}, 0.0);
  const InnerTolerance t = compute_inner_tol(1e-3, r, 0.0, 1.0, 2);
  CHECK(t.eps == 2e-3 * 2.0);
  CHECK_FALSE(t.capped);

  const RitzSet far = ritz_of({1.0, 100.0}, 0.0);
  const InnerTolerance u = compute_inner_tol(1e-2, far, 0.0, 1.0, 2);
  CHECK(u.eps == 2e-2 * (100.0 / 99.0));
  CHECK_FALSE(u.capped);
}

TEST_CASE("inner tolerance: cap") {
  const RitzSet r = ritz_of({1.0, 1.001}, 0.0);
  const InnerTolerance t = compute_inner_tol(1e-2, r, 0.0, 1.0, 2);
  CHECK(t.eps == kInnerTolCap);
  CHECK(t.capped);

  const RitzSet rep = ritz_of({1.0, 1.0, 3.0}, 0.0);
  const InnerTolerance s = compute_inner_tol(1e-6, rep, 0.0, 1.0, 3);
  CHECK(s.eps == kInnerTolCap);
  CHECK(s.capped);
}

TEST_CASE("inner tolerance: maximum over all other Ritz values") {
  const RitzSet r = ritz_of({1.0, 3.0, {1.0, 0.5}}, 0.0);
  const double expect = 2e-4 * std::max(3.0 / 2.0, std::abs(Complex{1.0, 0.5}) / 0.5);
  CHECK(compute_inner_tol(1e-4, r, 0.0, 1.0, 3).eps == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("relaxed SIA tolerance") {
  const double tol = 1e-10 * 8.0;
  const double early = relaxed_sia_tol(tol, 20, 1.0);
  CHECK(early == tol / 20.0);
  CHECK(early < 1e-10);
  CHECK(relaxed_sia_tol(1e-20, 20, 1.0) == 1e-14);
  const double t = relaxed_sia_tol(tol, 20, 1e-8);
  CHECK(t == doctest::Approx(tol / (20 * 1e-8)));
  CHECK(t == doctest::Approx(1e8 * early));
  CHECK(relaxed_sia_tol(tol, 20, 1e-14) == 0.1);
  CHECK(relaxed_sia_tol(tol, 20, 0.0) == 1e-14);
  CHECK(relaxed_sia_tol(tol, 20, std::numeric_limits<double>::infinity()) == 1e-14);
  double prev = 0.0;
  for (double r = 1.0; r > 1e-16; r /= 10.0) {
    const double cur = relaxed_sia_tol(tol, 30, r);
    CHECK(cur >= prev);
    prev = cur;
  }
  RelaxationSettings custom{1e-10, 0.5};
  CHECK(relaxed_sia_tol(tol, 20, 1.0, custom) == 1e-10);
  CHECK(relaxed_sia_tol(tol, 20, 1e-20, custom) == 0.5);
}
