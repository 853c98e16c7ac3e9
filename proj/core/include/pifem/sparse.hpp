#pragma once

#include <functional>
#include <iosfwd>
#include <tuple>
#include <vector>

namespace pifem {

using Vector = std::vector<double>;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
struct CsrMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_offsets;  // size n_rows + 1
  std::vector<int> column_indices;
  std::vector<double> values;

  double diagonal(int i) const;
  bool is_symmetric(double rel_tol = 1e-12) const;
};

CsrMatrix csr_from_triplets(int n_rows, int n_cols,
                            const std::vector<Triplet>& triplets);

Vector spmv(const CsrMatrix& A, const Vector& x);

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient for SPD systems.
/// Symmetry is checked entrywise; a non-converged run returns the best
/// iterate together with converged = false.
using CgObserver = std::function<void(int iteration, const Vector& iterate)>;

std::pair<Vector, SolveReport> cg_solve(const CsrMatrix& A, const Vector& b,
                                        double tol = 1e-10, int max_iter = -1,
                                        const CgObserver& observer = nullptr);

/// Coordinate text export, one `row col value` per line.
void write_matrix(std::ostream& os, const CsrMatrix& A);

}  // namespace pifem
