#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pifem/operators.hpp"
#include "pifem/solver.hpp"

namespace pifem {

/// Radially symmetric elliptic interface solution with a gradient kink at
/// r = r0: u = r^3/beta1 inside, r^3/beta2 + r0^3 (1/beta1 - 1/beta2)
/// outside. Solution and normal flux are continuous across the interface;
/// the source is -9r on both sides.
struct ExactSolutionKink {
  Point center{0.0, 0.0};
  double r0 = 0.5;
  double beta1 = 1.0;
  double beta2 = 10.0;

  double value(Point p) const;
  Point gradient(Point p) const;
  double source(Point p) const;       // -div(beta grad u)
  double flux_inner(double r) const;  // beta1 du/dr from inside
  double flux_outer(double r) const;
};

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double dt = 0.0;
  int n_dofs = 0;
  std::vector<double> errors;  // aligned with ConvergenceTable::norms
  std::vector<double> eoc;     // NaN on the first row / exact rows
  double seconds = 0.0;
  bool failed = false;
};

struct ConvergenceTable {
  std::vector<std::string> norms;
  std::vector<ConvergenceRow> rows;

  void compute_eoc();
  std::string to_csv() const;
  /// EOC of the given norm at the last level.
  double last_eoc(const std::string& norm) const;
};

struct SpaceTimeRef {
  SpaceTimeFn value;
  std::function<Point(Point, double)> grad;  // optional unless H1 norms used
};

enum class ErrorNorm { L2L2, LinfL2, L2H1 };

double error_norm(const Trajectory& u, const SpaceTimeRef& ref,
                  ErrorNorm which);
/// Coarse-vs-fine trajectory error; quadrature runs on the fine mesh, the
/// coarse function is evaluated by point location. Coarse time nodes must be
/// a subset of the fine ones.
double error_norm(const Trajectory& u, const Trajectory& fine,
                  ErrorNorm which);

double l2_error_at(const Trajectory& u, int n, const SpaceFn& ref);
double h1_error_at(const Trajectory& u, int n, const GradFn& grad_ref);

enum class StudyKind {
  Interp,
  L2Proj,
  Ritz,
  Elliptic,
  ParabolicSmooth,
  ParabolicDirac
};

StudyKind study_kind_from_string(const std::string& name);
std::string to_string(StudyKind kind);

struct StudyOptions {
  ProblemSpec spec;          // geometry and coefficients
  double interface_radius = 0.5;  // kink solution parameter (circle only)
  double target_h = 0.25;
  int levels = 4;
  int n_steps = 0;  // 0 = per-kind default
  double cg_tol = 1e-12;
  /// Overrides the default target function of interp/l2proj/ritz studies.
  SpaceFn custom_w;
  GradFn custom_grad_w;
};

ConvergenceTable run_study(StudyKind kind, const StudyOptions& opts);

void write_csv(const std::string& path, const ConvergenceTable& table);
/// Log-log error plot with h^1 and h^2 reference slopes.
void write_loglog_svg(const std::string& path, const ConvergenceTable& table,
                      const std::string& norm);

}  // namespace pifem
