#include "pifem/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pifem/errors.hpp"

namespace pifem {

FeFunction Trajectory::at(int n) const {
  return FeFunction{mesh, coeffs[n]};
}

FeFunction Trajectory::at_time(double t) const {
  if (t <= times.front()) return at(0);
  if (t >= times.back()) return at(static_cast<int>(times.size()) - 1);
  size_t n = 1;
  while (times[n] < t) ++n;
  double w = (t - times[n - 1]) / (times[n] - times[n - 1]);
  FeFunction u;
  u.mesh = mesh;
  u.coeffs.resize(coeffs[n].size());
  for (size_t i = 0; i < u.coeffs.size(); ++i)
    u.coeffs[i] = (1.0 - w) * coeffs[n - 1][i] + w * coeffs[n][i];
  return u;
}

namespace {

struct SteppingSystem {
  CsrMatrix M_full;
  CsrMatrix B_full;   // M + dt A
  CsrMatrix B_free;   // reduced to free dofs
  double dt;
};

SteppingSystem build_system(const ProblemSpec& spec, const Mesh& mesh,
                            const DofMap& dofs, int n_steps) {
  if (n_steps < 1) throw Error("n_steps must be >= 1");
  SteppingSystem s;
  s.dt = spec.T / n_steps;
  s.M_full = assemble_mass(mesh);
  CsrMatrix A = assemble_stiffness(mesh, spec);
  // M and A share the sparsity pattern of the P1 connectivity
  std::vector<Triplet> triplets;
  for (int i = 0; i < s.M_full.n_rows; ++i) {
    for (int k = s.M_full.row_offsets[i]; k < s.M_full.row_offsets[i + 1]; ++k)
      triplets.push_back({i, s.M_full.column_indices[k], s.M_full.values[k]});
    for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
      triplets.push_back({i, A.column_indices[k], s.dt * A.values[k]});
  }
  s.B_full = csr_from_triplets(s.M_full.n_rows, s.M_full.n_cols, triplets);
  Vector zero(mesh.n_vertices(), 0.0);
  s.B_free = apply_dirichlet(s.B_full, zero, mesh, dofs,
                             [](Point) { return 0.0; })
                 .first;
  return s;
}

Vector step_solve(const SteppingSystem& s, const Mesh& mesh,
                  const DofMap& dofs, const Vector& rhs_full,
                  const SpaceFn& boundary_values, const SolverOptions& opts,
                  int step_index) {
  // constrained part enters through the lifting of B
  Vector full(mesh.n_vertices(), 0.0);
  for (int v : dofs.constrained) full[v] = boundary_values(mesh.vertices[v]);
  Vector correction = spmv(s.B_full, full);
  Vector rf(dofs.n_free);
  for (int fi = 0; fi < dofs.n_free; ++fi) {
    int v = dofs.free_to_vertex[fi];
    rf[fi] = rhs_full[v] - correction[v];
  }
  auto [x, report] = cg_solve(s.B_free, rf, opts.cg_tol, opts.max_iter);
  if (!report.converged) {
    throw NotConverged("time step " + std::to_string(step_index) +
                       ": linear solve did not converge");
  }
  for (int fi = 0; fi < dofs.n_free; ++fi) full[dofs.free_to_vertex[fi]] = x[fi];
  return full;
}

// Measure load of one step: sum of atom impulses in (t_{n-1}, t_n] plus the
// density mass times the right-endpoint load of f.
Vector measure_step_load(const ProblemSpec& spec, const Mesh& mesh, double a,
                         double b) {
  Vector s(mesh.n_vertices(), 0.0);
  StepMass sm = step_mass(spec.sigma, a, b);
  for (auto& atom : sm.atoms) {
    Vector bf = assemble_load(mesh, [&](Point p) { return spec.f(p, atom.t); });
    for (size_t i = 0; i < s.size(); ++i) s[i] += atom.weight * bf[i];
  }
  if (sm.density_mass != 0.0) {
    Vector bf = assemble_load(mesh, [&](Point p) { return spec.f(p, b); });
    for (size_t i = 0; i < s.size(); ++i) s[i] += sm.density_mass * bf[i];
  }
  return s;
}

}  // namespace

Trajectory solve_forward(const ProblemSpec& spec, const Mesh& mesh,
                         const DofMap& dofs, int n_steps,
                         const SolverOptions& opts) {
  spec.validate();
  SteppingSystem sys = build_system(spec, mesh, dofs, n_steps);

  Trajectory traj;
  traj.mesh = &mesh;
  traj.times.resize(n_steps + 1);
  for (int n = 0; n <= n_steps; ++n) traj.times[n] = spec.T * n / n_steps;

  FeFunction u0h = l2_project(spec.u0, mesh, dofs, opts.cg_tol);
  Vector u = u0h.coeffs;
  for (int v : dofs.constrained)
    u[v] = spec.dirichlet(mesh.vertices[v], 0.0);
  traj.coeffs.push_back(u);

  for (int n = 1; n <= n_steps; ++n) {
    double tn = traj.times[n];
    Vector rhs = spmv(sys.M_full, u);
    Vector s = measure_step_load(spec, mesh, traj.times[n - 1], tn);
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += s[i];
    u = step_solve(sys, mesh, dofs, rhs,
                   [&](Point p) { return spec.dirichlet(p, tn); }, opts, n);
    traj.coeffs.push_back(u);
  }
  return traj;
}

Trajectory solve_backward(const SpaceTimeFn& g, const ProblemSpec& spec,
                          const Mesh& mesh, const DofMap& dofs, int n_steps,
                          const SolverOptions& opts) {
  spec.validate();
  SteppingSystem sys = build_system(spec, mesh, dofs, n_steps);

  Trajectory traj;
  traj.mesh = &mesh;
  traj.times.resize(n_steps + 1);
  for (int n = 0; n <= n_steps; ++n) traj.times[n] = spec.T * n / n_steps;
  traj.coeffs.assign(n_steps + 1, Vector(mesh.n_vertices(), 0.0));

  Vector psi(mesh.n_vertices(), 0.0);  // psi(T) = 0
  for (int n = n_steps; n >= 1; --n) {
    double tnm1 = traj.times[n - 1];
    Vector rhs = spmv(sys.M_full, psi);
    Vector bg = assemble_load(mesh, [&](Point p) { return g(p, tnm1); });
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += sys.dt * bg[i];
    psi = step_solve(sys, mesh, dofs, rhs, [](Point) { return 0.0; }, opts, n);
    traj.coeffs[n - 1] = psi;
  }
  return traj;
}

double duality_residual(const ProblemSpec& spec, const SpaceTimeFn& g,
                        const Mesh& mesh, const DofMap& dofs, int n_steps,
                        const SolverOptions& opts) {
  Trajectory u = solve_forward(spec, mesh, dofs, n_steps, opts);
  Trajectory psi = solve_backward(g, spec, mesh, dofs, n_steps, opts);
  if (u.times != psi.times) throw GridMismatch("time grids differ");

  double dt = spec.T / n_steps;
  CsrMatrix M = assemble_mass(mesh);

  // right-endpoint rule in u, matching the backward source at t_{n-1}
  double g_pairing = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    Vector bg =
        assemble_load(mesh, [&](Point p) { return g(p, u.times[n - 1]); });
    for (int v = 0; v < mesh.n_vertices(); ++v)
      g_pairing += dt * bg[v] * u.coeffs[n][v];
  }

  // <mu, psi_h> with the same per-step loads the forward sweep used
  double measure_pairing = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    Vector s = measure_step_load(spec, mesh, u.times[n - 1], u.times[n]);
    for (int v = 0; v < mesh.n_vertices(); ++v)
      measure_pairing += s[v] * psi.coeffs[n - 1][v];
  }

  Vector Mu0 = spmv(M, u.coeffs[0]);
  double initial_pairing = 0.0;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    initial_pairing += Mu0[v] * psi.coeffs[0][v];

  double defect = g_pairing - measure_pairing - initial_pairing;
  return std::abs(defect) / std::max(1.0, std::abs(g_pairing));
}

double pair_measure(const SpaceTimeFn& f, const TimeMeasure& sigma,
                    const SpaceTimeFn& v, const Mesh& mesh) {
  sigma.validate();
  const auto& rule = QuadratureRule::order4();
  auto space_inner = [&](double t) {
    double acc = 0.0;
    for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
      double area = mesh.triangle_area(tri);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        Point p = quad_point(mesh, tri, rule.points[q]);
        acc += rule.weights[q] * area * f(p, t) * v(p, t);
      }
    }
    return acc;
  };
  double result = 0.0;
  for (auto& atom : sigma.atoms) result += atom.weight * space_inner(atom.t);
  if (sigma.density) {
    result += integrate(
        [&](double t) { return sigma.density(t) * space_inner(t); }, 0.0,
        sigma.t_end, 1e-9);
  }
  return result;
}

double pair_measure(const SpaceTimeFn& f, const TimeMeasure& sigma,
                    const Trajectory& v) {
  const Mesh& mesh = *v.mesh;
  const auto& rule = QuadratureRule::order4();
  auto space_inner = [&](double t) {
    FeFunction vt = v.at_time(t);
    double acc = 0.0;
    for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
      double area = mesh.triangle_area(tri);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        Point p = quad_point(mesh, tri, rule.points[q]);
        acc += rule.weights[q] * area * f(p, t) * vt.value(tri, rule.points[q]);
      }
    }
    return acc;
  };
  sigma.validate();
  double result = 0.0;
  for (auto& atom : sigma.atoms) result += atom.weight * space_inner(atom.t);
  if (sigma.density) {
    result += integrate(
        [&](double t) { return sigma.density(t) * space_inner(t); }, 0.0,
        sigma.t_end, 1e-9);
  }
  return result;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  char buf[64];
  for (size_t n = 0; n < traj.times.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[n]);
    os << buf;
    for (double c : traj.coeffs[n]) {
      std::snprintf(buf, sizeof(buf), " %.17g", c);
      os << buf;
    }
    os << "\n";
  }
}

Trajectory load_trajectory(const std::string& path, const Mesh& mesh) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  Trajectory traj;
  traj.mesh = &mesh;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double t;
    ls >> t;
    Vector c(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (!(ls >> c[v])) throw Error("trajectory file: truncated line");
    }
    traj.times.push_back(t);
    traj.coeffs.push_back(std::move(c));
  }
  return traj;
}

}  // namespace pifem
