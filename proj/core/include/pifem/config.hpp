#pragma once

#include <map>
#include <string>

#include "pifem/analysis.hpp"
#include "pifem/assembly.hpp"

namespace pifem {

/// Flat key-value config with [section] headers; `#` starts a comment.
/// Measures use the inline syntax
///   sigma = {atoms = [[0.5, 1.0]], density = "none"}
/// where density is "none" or a registry expression (constant:c,
/// poly:c0,c1,..., sine:a,omega,phase).
struct RunConfig {
  Bounds domain{-1.0, -1.0, 1.0, 1.0};
  std::string curve_kind = "circle";
  Point curve_center{0.0, 0.0};
  double curve_radius = 0.5;
  double curve_radius_x = 0.5;
  double curve_radius_y = 0.5;

  double beta1 = 1.0;
  double beta2 = 10.0;
  double T = 1.0;
  std::string f_id = "zero";
  std::string u0_id = "zero";
  std::string dirichlet_id = "zero";
  std::string sigma_text = "{atoms = [], density = \"none\"}";

  int levels = 4;
  double target_h = 0.25;
  int n_steps = 0;
  double cg_tol = 1e-12;

  InterfaceCurve make_curve() const;
  ProblemSpec make_problem_spec() const;
  StudyOptions make_study_options() const;
};

RunConfig parse_config(const std::string& path);

TimeMeasure parse_measure(const std::string& text, double T);

/// Named space-time functions available to config files.
SpaceTimeFn registry_function(const std::string& id, const RunConfig& cfg);
bool registry_has(const std::string& id);

std::function<double(double)> density_from_registry(const std::string& expr);

}  // namespace pifem
