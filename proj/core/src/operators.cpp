#include "pifem/operators.hpp"

#include <cmath>

#include "pifem/errors.hpp"

namespace pifem {

double FeFunction::value(int t, const std::array<double, 3>& bary) const {
  auto [i, j, k] = mesh->triangles[t];
  return bary[0] * coeffs[i] + bary[1] * coeffs[j] + bary[2] * coeffs[k];
}

double FeFunction::value(Point p) const {
  Location loc = locate_point(*mesh, p);
  return value(loc.triangle, loc.bary);
}

Point FeFunction::gradient(int t) const {
  auto [i, j, k] = mesh->triangles[t];
  auto g = p1_gradients(*mesh, t);
  return coeffs[i] * g[0] + coeffs[j] * g[1] + coeffs[k] * g[2];
}

FeFunction lagrange_interpolate(const SpaceFn& w, const Mesh& mesh) {
  FeFunction u;
  u.mesh = &mesh;
  u.coeffs.resize(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    u.coeffs[v] = w(mesh.vertices[v]);
  return u;
}

FeFunction l2_project(const SpaceFn& w, const Mesh& mesh, const DofMap& dofs,
                      double tol) {
  CsrMatrix M = assemble_mass(mesh);
  Vector b = assemble_load(mesh, w);
  auto [Mr, br] =
      apply_dirichlet(M, b, mesh, dofs, [](Point) { return 0.0; });
  auto [x, report] = cg_solve(Mr, br, tol);
  if (!report.converged) throw NotConverged("l2_project: mass solve failed");
  FeFunction u;
  u.mesh = &mesh;
  u.coeffs.assign(mesh.n_vertices(), 0.0);
  for (int fi = 0; fi < dofs.n_free; ++fi)
    u.coeffs[dofs.free_to_vertex[fi]] = x[fi];
  return u;
}

FeFunction ritz_project(const SpaceFn& w, const std::optional<GradFn>& grad_w,
                        const FeFunction* w_fine, const Mesh& mesh,
                        const DofMap& dofs, const ProblemSpec& spec,
                        double tol) {
  if (!grad_w && !w_fine)
    throw MissingGradient(
        "ritz_project needs an analytic gradient or a fine-mesh function");

  const auto& rule = QuadratureRule::order4();
  Vector b(mesh.n_vertices(), 0.0);
  std::optional<PointLocator> fine_loc;
  if (!grad_w) fine_loc.emplace(*w_fine->mesh);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto [i, j, k] = mesh.triangles[t];
    int idx[3] = {i, j, k};
    auto grads = p1_gradients(mesh, t);
    double coeff = spec.beta(mesh.subdomain_tag[t]) * mesh.triangle_area(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Point p = quad_point(mesh, t, rule.points[q]);
      Point gw;
      if (grad_w) {
        gw = (*grad_w)(p);
      } else {
        Location loc = fine_loc->locate(p);
        gw = w_fine->gradient(loc.triangle);
      }
      for (int r = 0; r < 3; ++r)
        b[idx[r]] += coeff * rule.weights[q] * dot(gw, grads[r]);
    }
  }

  CsrMatrix A = assemble_stiffness(mesh, spec);
  auto [Ar, br] = apply_dirichlet(A, b, mesh, dofs, w);
  auto [x, report] = cg_solve(Ar, br, tol);
  if (!report.converged)
    throw NotConverged("ritz_project: stiffness solve failed");
  FeFunction u;
  u.mesh = &mesh;
  u.coeffs.resize(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    u.coeffs[v] = mesh.boundary_vertex[v] ? w(mesh.vertices[v]) : 0.0;
  for (int fi = 0; fi < dofs.n_free; ++fi)
    u.coeffs[dofs.free_to_vertex[fi]] = x[fi];
  return u;
}

double l2_error(const FeFunction& u, const SpaceFn& ref) {
  const auto& rule = QuadratureRule::order4();
  const Mesh& mesh = *u.mesh;
  double acc = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double area = mesh.triangle_area(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Point p = quad_point(mesh, t, rule.points[q]);
      double d = u.value(t, rule.points[q]) - ref(p);
      acc += rule.weights[q] * area * d * d;
    }
  }
  return std::sqrt(acc);
}

double h1_error(const FeFunction& u, const GradFn& grad_ref) {
  const auto& rule = QuadratureRule::order4();
  const Mesh& mesh = *u.mesh;
  double acc = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double area = mesh.triangle_area(t);
    Point gu = u.gradient(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Point p = quad_point(mesh, t, rule.points[q]);
      Point d = gu - grad_ref(p);
      acc += rule.weights[q] * area * dot(d, d);
    }
  }
  return std::sqrt(acc);
}

double l2_norm(const FeFunction& u) {
  return l2_error(u, [](Point) { return 0.0; });
}

}  // namespace pifem
