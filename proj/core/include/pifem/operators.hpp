#pragma once

#include <functional>
#include <optional>

#include "pifem/assembly.hpp"
#include "pifem/mesh.hpp"

namespace pifem {

using GradFn = std::function<Point(Point)>;

/// Piecewise-linear function on a mesh, one coefficient per vertex.
/// Constrained vertices carry their boundary values.
struct FeFunction {
  const Mesh* mesh = nullptr;
  Vector coeffs;

  double value(int triangle, const std::array<double, 3>& bary) const;
  double value(Point p) const;  // linear scan; use PointLocator for bulk
  Point gradient(int triangle) const;
};

/// Nodal interpolant: coefficients are the vertex values.
FeFunction lagrange_interpolate(const SpaceFn& w, const Mesh& mesh);

/// L² projection onto the zero-trace P1 space: solves the mass system with
/// an order-4 load of w.
FeFunction l2_project(const SpaceFn& w, const Mesh& mesh, const DofMap& dofs,
                      double tol = 1e-12);

/// Ritz (energy) projection. The load a(w, phi_i) is assembled from the
/// analytic gradient when supplied, else from a fine-mesh FE representation
/// of w by cross-mesh quadrature. Boundary coefficients are the vertex
/// values of w.
FeFunction ritz_project(const SpaceFn& w, const std::optional<GradFn>& grad_w,
                        const FeFunction* w_fine, const Mesh& mesh,
                        const DofMap& dofs, const ProblemSpec& spec,
                        double tol = 1e-12);

// L²/H¹(seminorm) errors against an analytic reference, order-4 quadrature.
double l2_error(const FeFunction& u, const SpaceFn& ref);
double h1_error(const FeFunction& u, const GradFn& grad_ref);
double l2_norm(const FeFunction& u);

}  // namespace pifem
