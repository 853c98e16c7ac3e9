#pragma once

#include <functional>
#include <vector>

#include "pifem/geometry.hpp"
#include "pifem/measure.hpp"
#include "pifem/mesh.hpp"
#include "pifem/sparse.hpp"

namespace pifem {

using SpaceFn = std::function<double(Point)>;
using SpaceTimeFn = std::function<double(Point, double)>;

/// Parabolic interface problem data: piecewise-constant diffusion, initial
/// value, space profile f, time measure sigma, final time and Dirichlet data.
/// Nonzero Dirichlet data is an extension for manufactured-solution tests;
/// the model problem has u = 0 on the outer boundary.
struct ProblemSpec {
  double beta1 = 1.0;
  double beta2 = 1.0;
  Bounds domain{-1.0, -1.0, 1.0, 1.0};
  InterfaceCurve curve = InterfaceCurve::circle({0.0, 0.0}, 0.5);
  SpaceFn u0 = [](Point) { return 0.0; };
  SpaceTimeFn f = [](Point, double) { return 0.0; };
  TimeMeasure sigma = TimeMeasure::zero(1.0);
  double T = 1.0;
  SpaceTimeFn dirichlet = [](Point, double) { return 0.0; };

  double beta(int tag) const { return tag == 1 ? beta1 : beta2; }
  void validate() const;
};

/// Free/constrained split of the vertex set; all outer-boundary vertices are
/// constrained.
struct DofMap {
  std::vector<int> vertex_to_free;  // -1 for constrained vertices
  std::vector<int> free_to_vertex;
  std::vector<int> constrained;
  int n_free = 0;
};

DofMap make_dof_map(const Mesh& mesh);

/// Symmetric quadrature rule in barycentric coordinates on the reference
/// triangle; weights sum to one.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int order = 0;

  static const QuadratureRule& midpoint();  // order 1
  static const QuadratureRule& order2();
  static const QuadratureRule& order4();    // 6-point
};

// Full matrices over all vertices; Dirichlet elimination happens separately.
CsrMatrix assemble_stiffness(const Mesh& mesh, const ProblemSpec& spec);
CsrMatrix assemble_mass(const Mesh& mesh);
Vector assemble_load(const Mesh& mesh, const SpaceFn& g,
                     const QuadratureRule& rule = QuadratureRule::order4());

/// Reduce a full system to the free dofs, folding boundary data into the
/// right-hand side via the standard lifting b_f -= A_fc g_c.
std::pair<CsrMatrix, Vector> apply_dirichlet(const CsrMatrix& A,
                                             const Vector& b, const Mesh& mesh,
                                             const DofMap& dofs,
                                             const SpaceFn& boundary_values);

/// Number of assembly worker threads (1 = sequential). The triplet merge is
/// deterministic for any worker count.
void set_assembly_threads(int n);
int assembly_threads();

// helpers shared by operators/analysis
std::array<Point, 3> p1_gradients(const Mesh& mesh, int t);
Point quad_point(const Mesh& mesh, int t, const std::array<double, 3>& bary);

}  // namespace pifem
