#include "sirajd/ilut.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace sirajd {

IlutFactors ilut_factor(const SparseMatrix& a, Complex shift, double droptol) {
  if (droptol < 0.0) throw std::invalid_argument("ilut_factor: droptol must be nonnegative");
  const std::size_t n = a.size();
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();

  std::vector<std::size_t> l_off{0}, u_off{0}, l_col, u_col, diag_pos(n);
  Vector l_val, u_val;

  Vector work(n, Complex{0.0, 0.0});
  std::vector<char> in_row(n, 0);
  std::vector<std::size_t> upper_idx;
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> lower_heap;
  std::vector<std::size_t> lower_kept;

  for (std::size_t i = 0; i < n; ++i) {
    // scatter row i of A - sigma I
    auto touch = [&](std::size_t j) {
      if (in_row[j]) return;
      in_row[j] = 1;
      if (j < i) {
        lower_heap.push(j);
      } else {
        upper_idx.push_back(j);
      }
    };
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      touch(col[k]);
      work[col[k]] += val[k];
    }
    touch(i);
    work[i] -= shift;

    double row_norm = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const Complex v = col[k] == i ? val[k] - shift : val[k];
      row_norm = std::hypot(row_norm, std::abs(v));
    }
    if (a.at(i, i) == Complex{0.0, 0.0}) row_norm = std::hypot(row_norm, std::abs(shift));
    if (row_norm == 0.0) throw ZeroPivotError(i);
    const double thresh = droptol * row_norm;

    // eliminate with previous rows in ascending column order
    lower_kept.clear();
    while (!lower_heap.empty()) {
      const std::size_t k = lower_heap.top();
      lower_heap.pop();
      Complex lik = work[k] / u_val[diag_pos[k]];
      work[k] = 0.0;
      in_row[k] = 0;
      if (std::abs(lik) < thresh) continue;
      work[k] = lik;
      in_row[k] = 1;
      lower_kept.push_back(k);
      for (std::size_t p = diag_pos[k] + 1; p < u_off[k + 1]; ++p) {
        const std::size_t j = u_col[p];
        touch(j);
        work[j] -= lik * u_val[p];
      }
    }

    for (std::size_t k : lower_kept) {
      l_col.push_back(k);
      l_val.push_back(work[k]);
      work[k] = 0.0;
      in_row[k] = 0;
    }
    l_off.push_back(l_col.size());

    std::sort(upper_idx.begin(), upper_idx.end());
    for (std::size_t j : upper_idx) {
      if (j == i) {
        if (work[j] == Complex{0.0, 0.0}) throw ZeroPivotError(i);
        diag_pos[i] = u_col.size();
        u_col.push_back(j);
        u_val.push_back(work[j]);
      } else if (std::abs(work[j]) >= thresh) {
        u_col.push_back(j);
        u_val.push_back(work[j]);
      }
      work[j] = 0.0;
      in_row[j] = 0;
    }
    upper_idx.clear();
    u_off.push_back(u_col.size());
  }

  IlutFactors f{SparseMatrix(n, std::move(l_off), std::move(l_col), std::move(l_val)),
                SparseMatrix(n, std::move(u_off), std::move(u_col), std::move(u_val)), std::move(diag_pos), droptol,
                shift};
  return f;
}

void precond_solve(const IlutFactors& m, ConstVectorView w, VectorView z) {
  const std::size_t n = m.size();
  require_same_size(n, w.size(), "precond_solve");
  require_same_size(n, z.size(), "precond_solve");
  const auto& lo = m.lower.row_offsets();
  const auto& lc = m.lower.col_indices();
  const auto& lv = m.lower.values();
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = w[i];
    for (std::size_t k = lo[i]; k < lo[i + 1]; ++k) s -= lv[k] * z[lc[k]];
    z[i] = s;
  }
  const auto& uo = m.upper.row_offsets();
  const auto& uc = m.upper.col_indices();
  const auto& uv = m.upper.values();
  for (std::size_t i = n; i-- > 0;) {
    Complex s = z[i];
    const std::size_t d = m.diag_pos[i];
    for (std::size_t k = d + 1; k < uo[i + 1]; ++k) s -= uv[k] * z[uc[k]];
    z[i] = s / uv[d];
  }
}

Vector precond_solve(const IlutFactors& m, ConstVectorView w) {
  Vector z(w.size());
  precond_solve(m, w, z);
  return z;
}

ProjectedPreconditioner::ProjectedPreconditioner(const IlutFactors& base, ConstVectorView y)
    : base_(&base), y_(y.begin(), y.end()), minv_y_(precond_solve(base, y)) {
  y_minv_y_ = dot(y_, minv_y_);
  if (std::abs(y_minv_y_) < 1e-14 * norm2(minv_y_)) {
    throw NearSingularProjectionError("projected preconditioner: |y^H M^{-1} y| is numerically zero");
  }
}

void ProjectedPreconditioner::apply(ConstVectorView w, VectorView z) const {
  precond_solve(*base_, w, z);
  const Complex coef = dot(y_, z) / y_minv_y_;
  axpy(-coef, minv_y_, z);
}

Vector ProjectedPreconditioner::apply(ConstVectorView w) const {
  Vector z(w.size());
  apply(w, z);
  return z;
}

}  // namespace sirajd
