#include "pifem/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pifem/errors.hpp"

namespace pifem {

void ProblemSpec::validate() const {
  if (beta1 <= 0.0 || beta2 <= 0.0) throw Error("beta must be positive");
  if (T <= 0.0) throw Error("final time must be positive");
  sigma.validate();
}

DofMap make_dof_map(const Mesh& mesh) {
  DofMap d;
  d.vertex_to_free.assign(mesh.n_vertices(), -1);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.boundary_vertex[v]) {
      d.constrained.push_back(v);
    } else {
      d.vertex_to_free[v] = d.n_free++;
      d.free_to_vertex.push_back(v);
    }
  }
  return d;
}

const QuadratureRule& QuadratureRule::midpoint() {
  static const QuadratureRule r{{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}, 1};
  return r;
}

const QuadratureRule& QuadratureRule::order2() {
  static const QuadratureRule r{
      {{2.0 / 3, 1.0 / 6, 1.0 / 6},
       {1.0 / 6, 2.0 / 3, 1.0 / 6},
       {1.0 / 6, 1.0 / 6, 2.0 / 3}},
      {1.0 / 3, 1.0 / 3, 1.0 / 3},
      2};
  return r;
}

const QuadratureRule& QuadratureRule::order4() {
  // 6-point degree-4 rule (Dunavant)
  const double a1 = 0.108103018168070, b1 = 0.445948490915965;
  const double a2 = 0.816847572980459, b2 = 0.091576213509771;
  const double w1 = 0.223381589678011, w2 = 0.109951743655322;
  static const QuadratureRule r{{{a1, b1, b1},
                                 {b1, a1, b1},
                                 {b1, b1, a1},
                                 {a2, b2, b2},
                                 {b2, a2, b2},
                                 {b2, b2, a2}},
                                {w1, w1, w1, w2, w2, w2},
                                4};
  return r;
}

std::array<Point, 3> p1_gradients(const Mesh& mesh, int t) {
  auto [i, j, k] = mesh.triangles[t];
  Point a = mesh.vertices[i], b = mesh.vertices[j], c = mesh.vertices[k];
  double two_area = cross(b - a, c - a);
  // grad of the barycentric function at vertex v is the inward normal of the
  // opposite edge scaled by 1/(2 area)
  auto g = [&](Point p, Point q) {
    return (1.0 / two_area) * Point{p.y - q.y, q.x - p.x};
  };
  return {g(b, c), g(c, a), g(a, b)};
}

Point quad_point(const Mesh& mesh, int t, const std::array<double, 3>& bary) {
  auto [i, j, k] = mesh.triangles[t];
  return bary[0] * mesh.vertices[i] + bary[1] * mesh.vertices[j] +
         bary[2] * mesh.vertices[k];
}

namespace {

std::atomic<int> g_assembly_threads{1};

template <class PerTriangle>
std::vector<Triplet> assemble_triplets(const Mesh& mesh,
                                       const PerTriangle& local) {
  int n_workers = std::clamp(g_assembly_threads.load(), 1, 64);
  int n_tri = mesh.n_triangles();
  if (n_workers == 1 || n_tri < 256) {
    std::vector<Triplet> out;
    out.reserve(static_cast<size_t>(n_tri) * 9);
    for (int t = 0; t < n_tri; ++t) local(t, out);
    return out;
  }
  std::vector<std::vector<Triplet>> buffers(n_workers);
  std::vector<std::thread> workers;
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      int lo = n_tri * w / n_workers, hi = n_tri * (w + 1) / n_workers;
      buffers[w].reserve(static_cast<size_t>(hi - lo) * 9);
      for (int t = lo; t < hi; ++t) local(t, buffers[w]);
    });
  }
  for (auto& th : workers) th.join();
  std::vector<Triplet> out;
  for (auto& b : buffers) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

void set_assembly_threads(int n) { g_assembly_threads = std::max(1, n); }
int assembly_threads() { return g_assembly_threads; }

CsrMatrix assemble_stiffness(const Mesh& mesh, const ProblemSpec& spec) {
  auto triplets = assemble_triplets(
      mesh, [&](int t, std::vector<Triplet>& out) {
        auto [i, j, k] = mesh.triangles[t];
        int idx[3] = {i, j, k};
        auto grads = p1_gradients(mesh, t);
        double coeff = spec.beta(mesh.subdomain_tag[t]) * mesh.triangle_area(t);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            out.push_back({idx[r], idx[c], coeff * dot(grads[r], grads[c])});
      });
  return csr_from_triplets(mesh.n_vertices(), mesh.n_vertices(), triplets);
}

CsrMatrix assemble_mass(const Mesh& mesh) {
  auto triplets = assemble_triplets(
      mesh, [&](int t, std::vector<Triplet>& out) {
        auto [i, j, k] = mesh.triangles[t];
        int idx[3] = {i, j, k};
        double area = mesh.triangle_area(t);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            out.push_back({idx[r], idx[c], area / 12.0 * (r == c ? 2.0 : 1.0)});
      });
  return csr_from_triplets(mesh.n_vertices(), mesh.n_vertices(), triplets);
}

Vector assemble_load(const Mesh& mesh, const SpaceFn& g,
                     const QuadratureRule& rule) {
  Vector b(mesh.n_vertices(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto [i, j, k] = mesh.triangles[t];
    int idx[3] = {i, j, k};
    double area = mesh.triangle_area(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Point p = quad_point(mesh, t, rule.points[q]);
      double gv = g(p) * rule.weights[q] * area;
      for (int r = 0; r < 3; ++r) b[idx[r]] += gv * rule.points[q][r];
    }
  }
  return b;
}

std::pair<CsrMatrix, Vector> apply_dirichlet(const CsrMatrix& A,
                                             const Vector& b, const Mesh& mesh,
                                             const DofMap& dofs,
                                             const SpaceFn& boundary_values) {
  int n = mesh.n_vertices();
  if (A.n_rows != n || static_cast<int>(b.size()) != n)
    throw DimensionMismatch("apply_dirichlet: full system expected");

  Vector lift(n, 0.0);
  for (int v : dofs.constrained) lift[v] = boundary_values(mesh.vertices[v]);
  Vector correction = spmv(A, lift);

  std::vector<Triplet> triplets;
  Vector br(dofs.n_free);
  for (int fi = 0; fi < dofs.n_free; ++fi) {
    int v = dofs.free_to_vertex[fi];
    br[fi] = b[v] - correction[v];
    for (int k = A.row_offsets[v]; k < A.row_offsets[v + 1]; ++k) {
      int fc = dofs.vertex_to_free[A.column_indices[k]];
      if (fc >= 0) triplets.push_back({fi, fc, A.values[k]});
    }
  }
  return {csr_from_triplets(dofs.n_free, dofs.n_free, triplets), br};
}

}  // namespace pifem
