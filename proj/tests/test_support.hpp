#pragma once

// Shared helpers for the unit tests: dense linear-algebra oracles and mesh
// invariant checks used across several suites.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "pifem/mesh.hpp"
#include "pifem/sparse.hpp"

namespace testsupport {

using pifem::CsrMatrix;
using pifem::Mesh;
using pifem::Point;
using pifem::Vector;

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const CsrMatrix& A) {
  Dense D(A.n_rows, std::vector<double>(A.n_cols, 0.0));
  for (int i = 0; i < A.n_rows; ++i)
    for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
      D[i][A.column_indices[k]] = A.values[k];
  return D;
}

inline Vector dense_matvec(const Dense& D, const Vector& x) {
  Vector y(D.size(), 0.0);
  for (size_t i = 0; i < D.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] += D[i][j] * x[j];
  return y;
}

// Cholesky solve of a dense SPD system; the independent oracle for CG.
inline Vector dense_cholesky_solve(Dense A, Vector b) {
  int n = static_cast<int>(b.size());
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) A[j][j] -= A[j][k] * A[j][k];
    A[j][j] = std::sqrt(A[j][j]);
    for (int i = j + 1; i < n; ++i) {
      for (int k = 0; k < j; ++k) A[i][j] -= A[i][k] * A[j][k];
      A[i][j] /= A[j][j];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) b[i] -= A[i][k] * b[k];
    b[i] /= A[i][i];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) b[i] -= A[k][i] * b[k];
    b[i] /= A[i][i];
  }
  return b;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Vector random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// --- mesh invariant checks -------------------------------------------------

// Conformity (exhaustive at desk scale): every edge is shared by at most two
// triangles, and no vertex lies strictly inside another triangle's edge.
inline bool check_conformity(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (auto& [e, c] : edge_count)
    if (c > 2) return false;
  // hanging-node scan: vertex strictly interior to an edge segment
  double tol = 1e-9 * mesh.diam();
  for (auto& [e, c] : edge_count) {
    Point a = mesh.vertices[e.first], b = mesh.vertices[e.second];
    double len = dist(a, b);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (v == e.first || v == e.second) continue;
      Point p = mesh.vertices[v];
      double t = dot(p - a, b - a) / (len * len);
      if (t < 1e-6 || t > 1.0 - 1e-6) continue;
      Point foot = a + t * (b - a);
      if (dist(p, foot) < tol) return false;
    }
  }
  return true;
}

// Fitted property: no triangle has vertices of strictly opposite level-set
// sign, and interface triangles have at most one interface edge.
inline bool check_fitted(const Mesh& mesh, const pifem::InterfaceCurve& curve) {
  double tol = 1e-10 * mesh.diam();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    int pos = 0, neg = 0, iface_edges = 0;
    for (int e = 0; e < 3; ++e) {
      int v = mesh.triangles[t][e];
      if (mesh.interface_vertex[v]) continue;
      double phi = curve.levelset(mesh.vertices[v]);
      if (phi > tol) ++pos;
      if (phi < -tol) ++neg;
    }
    if (pos > 0 && neg > 0) return false;
    for (int e = 0; e < 3; ++e) {
      int a = mesh.triangles[t][e], b = mesh.triangles[t][(e + 1) % 3];
      if (mesh.interface_vertex[a] && mesh.interface_vertex[b]) {
        for (auto& ie : mesh.interface_edges) {
          if ((ie[0] == a && ie[1] == b) || (ie[0] == b && ie[1] == a))
            ++iface_edges;
        }
      }
    }
    if (iface_edges > 1) return false;
  }
  return true;
}

inline bool check_tags(const Mesh& mesh, const pifem::InterfaceCurve& curve) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double phi = curve.levelset(mesh.barycenter(t));
    int want = phi < 0.0 ? 1 : 2;
    if (mesh.subdomain_tag[t] != want) return false;
  }
  return true;
}

inline double total_area(const Mesh& mesh) {
  double a = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) a += mesh.triangle_area(t);
  return a;
}

inline double max_interface_levelset(const Mesh& mesh,
                                     const pifem::InterfaceCurve& curve) {
  double m = 0.0;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.interface_vertex[v])
      m = std::max(m, std::abs(curve.levelset(mesh.vertices[v])));
  return m;
}

}  // namespace testsupport
