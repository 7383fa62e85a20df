#include "sirajd/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sirajd {

InnerTolerance compute_inner_tol(double teps, const RitzSet& ritz, Complex sigma, Complex nu, std::size_t m) {
  if (m <= 1) return {teps, false};
  const std::size_t count = std::min(m, ritz.size());
  double worst = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    const Complex gap = ritz.values[i] - nu;
    if (gap == Complex{0.0, 0.0}) {
      worst = std::numeric_limits<double>::infinity();
      break;
    }
    worst = std::max(worst, std::abs((ritz.values[i] - sigma) / gap));
  }
  if (count <= 1) return {kInnerTolCap, true};
  const double eps = 2.0 * teps * worst;
  if (!(eps < kInnerTolCap)) return {kInnerTolCap, true};
  return {eps, false};
}

double relaxed_sia_tol(double outer_tol, std::size_t m_budget, double current_residual_norm,
                       const RelaxationSettings& settings) {
  if (!(current_residual_norm > 0.0) || !std::isfinite(current_residual_norm)) return settings.floor;
  const double budget = static_cast<double>(std::max<std::size_t>(m_budget, 1));
  const double t = outer_tol / (budget * current_residual_norm);
  return std::min(settings.cap, std::max(settings.floor, t));
}

}  // namespace sirajd
