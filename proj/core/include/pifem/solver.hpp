#pragma once

#include <string>
#include <vector>

#include "pifem/assembly.hpp"
#include "pifem/operators.hpp"

namespace pifem {

/// Time-indexed sequence of full FE coefficient vectors on one mesh.
struct Trajectory {
  std::vector<double> times;           // 0 = t0 < ... < tN = T
  std::vector<Vector> coeffs;          // one per grid point, full vectors
  const Mesh* mesh = nullptr;

  int n_steps() const { return static_cast<int>(times.size()) - 1; }
  FeFunction at(int n) const;
  /// Piecewise-linear interpolation in time.
  FeFunction at_time(double t) const;
};

struct SolverOptions {
  double cg_tol = 1e-10;
  int max_iter = -1;  // -1 means 20*n
};

/// Backward Euler for the forward problem with measure forcing. Atoms are
/// injected as impulses into the step owning them under the (a, b] rule;
/// the density part uses the right-endpoint load.
Trajectory solve_forward(const ProblemSpec& spec, const Mesh& mesh,
                         const DofMap& dofs, int n_steps,
                         const SolverOptions& opts = {});

/// Backward Euler sweep for the adjoint problem with terminal value zero.
/// beta is scalar so the same stiffness matrix is reused.
Trajectory solve_backward(const SpaceTimeFn& g, const ProblemSpec& spec,
                          const Mesh& mesh, const DofMap& dofs, int n_steps,
                          const SolverOptions& opts = {});

/// Relative defect of the discrete summation-by-parts identity
/// (g, u_h) = <mu, psi_h> + (L_h u0, psi_h(0)) on matching grids.
double duality_residual(const ProblemSpec& spec, const SpaceTimeFn& g,
                        const Mesh& mesh, const DofMap& dofs, int n_steps,
                        const SolverOptions& opts = {});

/// <mu, v> for a trajectory (time interpolation is piecewise linear).
double pair_measure(const SpaceTimeFn& f, const TimeMeasure& sigma,
                    const Trajectory& v);
double pair_measure(const SpaceTimeFn& f, const TimeMeasure& sigma,
                    const SpaceTimeFn& v, const Mesh& mesh);

// Trajectory export/import: one line per time step, t then coefficients.
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path, const Mesh& mesh);

}  // namespace pifem
