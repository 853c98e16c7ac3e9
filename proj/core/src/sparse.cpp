#include "pifem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pifem/errors.hpp"

namespace pifem {

double CsrMatrix::diagonal(int i) const {
  for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
    if (column_indices[k] == i) return values[k];
  }
  return 0.0;
}

bool CsrMatrix::is_symmetric(double rel_tol) const {
  if (n_rows != n_cols) return false;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  auto entry = [&](int i, int j) {
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (column_indices[k] == j) return values[k];
    }
    return 0.0;
  };
  for (int i = 0; i < n_rows; ++i) {
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      int j = column_indices[k];
      if (j <= i) continue;
      if (std::abs(values[k] - entry(j, i)) > rel_tol * std::max(1.0, scale))
        return false;
    }
  }
  return true;
}

CsrMatrix csr_from_triplets(int n_rows, int n_cols,
                            const std::vector<Triplet>& triplets) {
  for (auto& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw IndexOutOfRange("triplet index outside matrix dimensions");
  }
  std::vector<Triplet> sorted = triplets;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                   });
  CsrMatrix A;
  A.n_rows = n_rows;
  A.n_cols = n_cols;
  A.row_offsets.assign(n_rows + 1, 0);
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && sorted[j].row == sorted[i].row &&
           sorted[j].col == sorted[i].col) {
      sum += sorted[j].value;
      ++j;
    }
    A.column_indices.push_back(sorted[i].col);
    A.values.push_back(sum);
    A.row_offsets[sorted[i].row + 1]++;
    i = j;
  }
  for (int r = 0; r < n_rows; ++r) A.row_offsets[r + 1] += A.row_offsets[r];
  return A;
}

Vector spmv(const CsrMatrix& A, const Vector& x) {
  if (static_cast<int>(x.size()) != A.n_cols)
    throw DimensionMismatch("spmv: vector length does not match columns");
  Vector y(A.n_rows, 0.0);
  for (int i = 0; i < A.n_rows; ++i) {
    double acc = 0.0;
    for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
      acc += A.values[k] * x[A.column_indices[k]];
    y[i] = acc;
  }
  return y;
}

namespace {

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::pair<Vector, SolveReport> cg_solve(const CsrMatrix& A, const Vector& b,
                                        double tol, int max_iter,
                                        const CgObserver& observer) {
  const int n = A.n_rows;
  if (A.n_cols != n || static_cast<int>(b.size()) != n)
    throw DimensionMismatch("cg_solve: dimension mismatch");
  if (n == 0) return {Vector{}, SolveReport{0, 0.0, true}};
  if (!A.is_symmetric()) throw NotSymmetric("cg_solve: matrix not symmetric");
  Vector inv_diag(n);
  for (int i = 0; i < n; ++i) {
    double d = A.diagonal(i);
    if (d <= 0.0) throw NotSymmetric("cg_solve: non-positive diagonal");
    inv_diag[i] = 1.0 / d;
  }
  if (max_iter < 0) max_iter = 20 * n;

  Vector x(n, 0.0);
  Vector r = b;
  double bnorm = norm2(b);
  if (bnorm == 0.0) return {x, SolveReport{0, 0.0, true}};
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  Vector p = z;
  double rz = dot(r, z);
  SolveReport report;
  Vector best_x = x;
  double best_res = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector Ap = spmv(A, p);
    double alpha = rz / dot(p, Ap);
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (observer) observer(it, x);
    double res = norm2(r) / bnorm;
    report.iterations = it;
    report.relative_residual = res;
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (res <= tol) {
      report.converged = true;
      return {x, report};
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  report.converged = false;
  report.relative_residual = best_res;
  return {best_x, report};
}

void write_matrix(std::ostream& os, const CsrMatrix& A) {
  char buf[128];
  for (int i = 0; i < A.n_rows; ++i) {
    for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, A.column_indices[k],
                    A.values[k]);
      os << buf;
    }
  }
}

}  // namespace pifem
