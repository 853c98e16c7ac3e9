// Command-line driver: meshing, forward solves and convergence studies from
// a flat config file. Exit codes: 0 success, 1 numerical failure, 2 config
// error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pifem/analysis.hpp"
#include "pifem/config.hpp"
#include "pifem/errors.hpp"
#include "pifem/mesh.hpp"
#include "pifem/solver.hpp"

namespace fs = std::filesystem;
using namespace pifem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
};

Mesh build_level_mesh(const RunConfig& cfg, double target_h, int level) {
  InterfaceCurve curve = cfg.make_curve();
  Mesh mesh = build_interface_mesh(cfg.domain, curve, target_h);
  for (int l = 0; l < level; ++l) mesh = refine(mesh, curve);
  return mesh;
}

int run_mesh(const CommonArgs& args, double target_h) {
  RunConfig cfg = parse_config(args.config_path);
  if (target_h > 0.0) cfg.target_h = target_h;
  Mesh mesh = build_interface_mesh(cfg.domain, cfg.make_curve(), cfg.target_h);
  QualityReport q = quality_report(mesh);
  fs::create_directories(args.out_dir);
  std::string path = (fs::path(args.out_dir) / "mesh.txt").string();
  save_mesh(path, mesh);
  std::printf(
      "mesh: %d vertices, %d triangles, %d interface edges\n"
      "h_max %.6g  h_min %.6g  min_angle %.4g rad  qu_ratio %.4g\n"
      "wrote %s\n",
      q.n_vertices, q.n_triangles, q.n_interface_edges, q.h_max, q.h_min,
      q.min_angle, q.quasi_uniformity_ratio, path.c_str());
  return 0;
}

int run_solve(const CommonArgs& args) {
  RunConfig cfg = parse_config(args.config_path);
  ProblemSpec spec = cfg.make_problem_spec();
  Mesh mesh = build_interface_mesh(cfg.domain, spec.curve, cfg.target_h);
  DofMap dofs = make_dof_map(mesh);
  int n_steps = cfg.n_steps > 0 ? cfg.n_steps : 64;
  Trajectory traj =
      solve_forward(spec, mesh, dofs, n_steps, SolverOptions{cfg.cg_tol});
  fs::create_directories(args.out_dir);
  save_mesh((fs::path(args.out_dir) / "mesh.txt").string(), mesh);
  save_trajectory((fs::path(args.out_dir) / "trajectory.txt").string(), traj);
  std::printf("solved %d steps on %d dofs; wrote mesh.txt, trajectory.txt\n",
              n_steps, dofs.n_free);
  return 0;
}

int run_study(const CommonArgs& args, const std::string& kind_name, int levels,
              double target_h) {
  RunConfig cfg = parse_config(args.config_path);
  if (levels > 0) cfg.levels = levels;
  if (target_h > 0.0) cfg.target_h = target_h;
  StudyKind kind = study_kind_from_string(kind_name);
  StudyOptions opts = cfg.make_study_options();
  ConvergenceTable table = run_study(kind, opts);
  fs::create_directories(args.out_dir);
  std::string base = (fs::path(args.out_dir) / to_string(kind)).string();
  write_csv(base + ".csv", table);
  std::printf("%s", table.to_csv().c_str());
  for (auto& norm : table.norms) {
    std::string svg = base + "_" + norm + ".svg";
    write_loglog_svg(svg, table, norm);
  }
  for (auto& row : table.rows) {
    if (row.failed) {
      std::fprintf(stderr, "study: level %d failed to converge\n", row.level);
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D P1 finite elements for parabolic interface problems with "
               "measure data in time"};
  app.require_subcommand(1);

  CommonArgs args;
  double target_h = 0.0;
  int levels = 0;
  std::string kind = "ritz";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "config file path")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--threads", args.threads,
                    "assembly worker threads (1 = bit-reproducible)");
  };

  auto* mesh_cmd = app.add_subcommand("mesh", "build a fitted mesh");
  add_common(mesh_cmd);
  mesh_cmd->add_option("--target-h", target_h, "target mesh size");

  auto* solve_cmd = app.add_subcommand("solve", "run the forward solver");
  add_common(solve_cmd);

  auto* study_cmd = app.add_subcommand("study", "run a convergence study");
  add_common(study_cmd);
  study_cmd->add_option("--kind", kind,
                        "interp | l2proj | ritz | elliptic | parabolic_smooth "
                        "| parabolic_dirac");
  study_cmd->add_option("--levels", levels, "number of refinement levels");
  study_cmd->add_option("--target-h", target_h, "coarsest mesh size");

  CLI11_PARSE(app, argc, argv);
  set_assembly_threads(args.threads);

  try {
    if (mesh_cmd->parsed()) return run_mesh(args, target_h);
    if (solve_cmd->parsed()) return run_solve(args);
    return run_study(args, kind, levels, target_h);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
