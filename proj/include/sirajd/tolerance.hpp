#pragma once

#include <cstddef>

#include "sirajd/dense.hpp"

namespace sirajd {

struct InnerTolerance {
  double eps = 0.0;
  bool capped = false;  // the 0.1 ceiling was applied
};

inline constexpr double kInnerTolCap = 0.1;

/// Inner relative-residual tolerance for SIRA and JD at outer step m:
///
///   eps = min(2 * teps * max_{i>=2} |(nu_i - sigma) / (nu_i - nu)|, 0.1),
///
/// with eps = teps at m = 1. `ritz` must be ordered by distance to sigma so
/// that ritz.values[0] is nu. A repeated Ritz value (nu_i == nu) makes its
/// term infinite, which lands on the cap.
InnerTolerance compute_inner_tol(double teps, const RitzSet& ritz, Complex sigma, Complex nu, std::size_t m);

struct RelaxationSettings {
  double floor = 1e-14;
  double cap = 0.1;
};

/// Inner tolerance for inexact shift-invert Arnoldi: tight while the outer
/// residual is large, loosened in proportion to 1/||r|| as it converges.
///
///   min(cap, max(floor, outer_tol / (m_budget * ||r||)))
///
/// A nonpositive or non-finite residual (no outer iterate yet) yields `floor`.
double relaxed_sia_tol(double outer_tol, std::size_t m_budget, double current_residual_norm,
                       const RelaxationSettings& settings = {});

}  // namespace sirajd
