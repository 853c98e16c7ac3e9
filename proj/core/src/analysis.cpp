#include "pifem/analysis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pifem/errors.hpp"

namespace pifem {

double ExactSolutionKink::value(Point p) const {
  double r = dist(p, center);
  if (r <= r0) return r * r * r / beta1;
  return r * r * r / beta2 + r0 * r0 * r0 * (1.0 / beta1 - 1.0 / beta2);
}

Point ExactSolutionKink::gradient(Point p) const {
  double r = dist(p, center);
  double beta = r <= r0 ? beta1 : beta2;
  return (3.0 * r / beta) * (p - center);
}

double ExactSolutionKink::source(Point p) const {
  return -9.0 * dist(p, center);
}

double ExactSolutionKink::flux_inner(double r) const { return 3.0 * r * r; }
double ExactSolutionKink::flux_outer(double r) const { return 3.0 * r * r; }

void ConvergenceTable::compute_eoc() {
  for (size_t r = 0; r < rows.size(); ++r) {
    rows[r].eoc.assign(norms.size(), std::nan(""));
    if (r == 0 || rows[r].failed || rows[r - 1].failed) continue;
    for (size_t c = 0; c < norms.size(); ++c) {
      double e0 = rows[r - 1].errors[c], e1 = rows[r].errors[c];
      if (e0 <= 1e-12 && e1 <= 1e-12) continue;  // exact, leave NaN
      rows[r].eoc[c] =
          std::log(e0 / e1) / std::log(rows[r - 1].h / rows[r].h);
    }
  }
}

std::string ConvergenceTable::to_csv() const {
  std::ostringstream os;
  os << "level,h,dt,ndofs";
  for (auto& n : norms) os << "," << n;
  for (auto& n : norms) os << ",eoc_" << n;
  os << ",seconds\n";
  char buf[64];
  auto num = [&](double v) {
    if (std::isnan(v)) return std::string("exact");
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  for (auto& r : rows) {
    os << r.level << "," << num(r.h) << "," << num(r.dt) << "," << r.n_dofs;
    for (double e : r.errors) os << "," << num(e);
    for (double e : r.eoc) os << "," << num(e);
    os << "," << num(r.seconds) << "\n";
  }
  return os.str();
}

double ConvergenceTable::last_eoc(const std::string& norm) const {
  for (size_t c = 0; c < norms.size(); ++c) {
    if (norms[c] == norm) return rows.back().eoc[c];
  }
  throw Error("no such norm column: " + norm);
}

namespace {

double l2_at_node(const Trajectory& u, int n, const SpaceTimeFn& ref) {
  FeFunction un = u.at(n);
  double t = u.times[n];
  return l2_error(un, [&](Point p) { return ref(p, t); });
}

double h1_at_node(const Trajectory& u, int n,
                  const std::function<Point(Point, double)>& gref) {
  FeFunction un = u.at(n);
  double t = u.times[n];
  return h1_error(un, [&](Point p) { return gref(p, t); });
}

double time_trapezoid(const std::vector<double>& times,
                      const std::vector<double>& squared) {
  double acc = 0.0;
  for (size_t n = 1; n < times.size(); ++n)
    acc += 0.5 * (times[n] - times[n - 1]) * (squared[n] + squared[n - 1]);
  return std::sqrt(acc);
}

}  // namespace

double error_norm(const Trajectory& u, const SpaceTimeRef& ref,
                  ErrorNorm which) {
  size_t nn = u.times.size();
  std::vector<double> vals(nn);
  if (which == ErrorNorm::L2H1) {
    for (size_t n = 0; n < nn; ++n)
      vals[n] = h1_at_node(u, static_cast<int>(n), ref.grad);
  } else {
    for (size_t n = 0; n < nn; ++n)
      vals[n] = l2_at_node(u, static_cast<int>(n), ref.value);
  }
  if (which == ErrorNorm::LinfL2)
    return *std::max_element(vals.begin(), vals.end());
  for (auto& v : vals) v *= v;
  return time_trapezoid(u.times, vals);
}

double error_norm(const Trajectory& u, const Trajectory& fine,
                  ErrorNorm which) {
  if (which == ErrorNorm::L2H1)
    throw Error("L2H1 coarse-vs-fine norm not supported");
  const Mesh& fine_mesh = *fine.mesh;
  const Mesh& coarse_mesh = *u.mesh;
  double tol = 1e-10 * fine.times.back();
  std::vector<int> fine_index(u.times.size());
  for (size_t n = 0; n < u.times.size(); ++n) {
    int hit = -1;
    for (size_t m = 0; m < fine.times.size(); ++m) {
      if (std::abs(fine.times[m] - u.times[n]) <= tol) {
        hit = static_cast<int>(m);
        break;
      }
    }
    if (hit < 0)
      throw GridMismatch("coarse time node missing from reference grid");
    fine_index[n] = hit;
  }

  PointLocator coarse_loc(coarse_mesh);
  const auto& rule = QuadratureRule::order4();
  // cache coarse locations of all fine quadrature points
  std::vector<Location> locs(fine_mesh.n_triangles() * rule.points.size());
  for (int t = 0; t < fine_mesh.n_triangles(); ++t) {
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Point p = quad_point(fine_mesh, t, rule.points[q]);
      locs[t * rule.points.size() + q] = coarse_loc.locate(p);
    }
  }

  std::vector<double> vals(u.times.size());
  for (size_t n = 0; n < u.times.size(); ++n) {
    FeFunction uc = u.at(static_cast<int>(n));
    FeFunction uf = fine.at(fine_index[n]);
    double acc = 0.0;
    for (int t = 0; t < fine_mesh.n_triangles(); ++t) {
      double area = fine_mesh.triangle_area(t);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const Location& loc = locs[t * rule.points.size() + q];
        double d = uc.value(loc.triangle, loc.bary) -
                   uf.value(t, rule.points[q]);
        acc += rule.weights[q] * area * d * d;
      }
    }
    vals[n] = std::sqrt(acc);
  }
  if (which == ErrorNorm::LinfL2)
    return *std::max_element(vals.begin(), vals.end());
  for (auto& v : vals) v *= v;
  return time_trapezoid(u.times, vals);
}

double l2_error_at(const Trajectory& u, int n, const SpaceFn& ref) {
  return l2_error(u.at(n), ref);
}

double h1_error_at(const Trajectory& u, int n, const GradFn& grad_ref) {
  return h1_error(u.at(n), grad_ref);
}

StudyKind study_kind_from_string(const std::string& name) {
  if (name == "interp") return StudyKind::Interp;
  if (name == "l2proj") return StudyKind::L2Proj;
  if (name == "ritz") return StudyKind::Ritz;
  if (name == "elliptic") return StudyKind::Elliptic;
  if (name == "parabolic_smooth") return StudyKind::ParabolicSmooth;
  if (name == "parabolic_dirac") return StudyKind::ParabolicDirac;
  throw ConfigError("unknown study kind: " + name);
}

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Interp: return "interp";
    case StudyKind::L2Proj: return "l2proj";
    case StudyKind::Ritz: return "ritz";
    case StudyKind::Elliptic: return "elliptic";
    case StudyKind::ParabolicSmooth: return "parabolic_smooth";
    case StudyKind::ParabolicDirac: return "parabolic_dirac";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Smooth test function vanishing on the rectangle boundary.
SpaceFn boundary_bubble(Bounds d) {
  return [d](Point p) {
    return std::sin(M_PI * (p.x - d.xmin) / d.width()) *
           std::sin(M_PI * (p.y - d.ymin) / d.height());
  };
}

GradFn boundary_bubble_grad(Bounds d) {
  return [d](Point p) {
    double kx = M_PI / d.width(), ky = M_PI / d.height();
    double sx = std::sin(kx * (p.x - d.xmin)), cx = std::cos(kx * (p.x - d.xmin));
    double sy = std::sin(ky * (p.y - d.ymin)), cy = std::cos(ky * (p.y - d.ymin));
    return Point{kx * cx * sy, ky * sx * cy};
  };
}

std::vector<Mesh> build_level_hierarchy(const StudyOptions& opts, int levels) {
  std::vector<Mesh> meshes;
  meshes.push_back(
      build_interface_mesh(opts.spec.domain, opts.spec.curve, opts.target_h));
  for (int l = 1; l < levels; ++l)
    meshes.push_back(refine(meshes.back(), opts.spec.curve));
  return meshes;
}

}  // namespace

ConvergenceTable run_study(StudyKind kind, const StudyOptions& opts) {
  if (opts.levels < 3) throw Error("a study needs at least 3 levels");
  const ProblemSpec& spec = opts.spec;
  Point center{0.5 * (spec.domain.xmin + spec.domain.xmax),
               0.5 * (spec.domain.ymin + spec.domain.ymax)};
  ExactSolutionKink kink{center, opts.interface_radius, spec.beta1,
                         spec.beta2};

  ConvergenceTable table;
  bool stationary = kind == StudyKind::Interp || kind == StudyKind::L2Proj ||
                    kind == StudyKind::Ritz || kind == StudyKind::Elliptic;
  if (stationary) {
    table.norms = {"l2", "h1"};
  } else if (kind == StudyKind::ParabolicSmooth) {
    table.norms = {"linf_l2"};
  } else {
    table.norms = {"l2_l2"};
  }

  int n_meshes = opts.levels + (kind == StudyKind::ParabolicDirac ? 1 : 0);
  std::vector<Mesh> meshes = build_level_hierarchy(opts, n_meshes);

  // reference trajectory for the Dirac study: one level finer, 4x finer in
  // time than the finest level, compared by cross-mesh quadrature. The step
  // count doubles per level so the first-order time error does not mask the
  // spatial rate.
  Trajectory reference;
  int n_steps_dirac = opts.n_steps > 0 ? opts.n_steps : 256;
  SpaceTimeFn dirac_profile = [](Point p, double) {
    return std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
  };
  if (kind == StudyKind::ParabolicDirac) {
    ProblemSpec ref_spec = spec;
    ref_spec.f = dirac_profile;
    ref_spec.sigma = TimeMeasure::dirac(spec.T / 2.0, 1.0, spec.T);
    ref_spec.u0 = [](Point) { return 0.0; };
    const Mesh& rm = meshes.back();
    DofMap rd = make_dof_map(rm);
    reference =
        solve_forward(ref_spec, rm, rd,
                      4 * (n_steps_dirac << (opts.levels - 1)),
                      SolverOptions{opts.cg_tol});
  }

  for (int l = 0; l < opts.levels; ++l) {
    auto t0 = Clock::now();
    const Mesh& mesh = meshes[l];
    DofMap dofs = make_dof_map(mesh);
    ConvergenceRow row;
    row.level = l;
    row.h = mesh.h_max;
    row.n_dofs = dofs.n_free;
    try {
      switch (kind) {
        case StudyKind::Interp: {
          SpaceFn w = opts.custom_w
                          ? opts.custom_w
                          : SpaceFn([&](Point p) { return kink.value(p); });
          GradFn gw = opts.custom_w
                          ? opts.custom_grad_w
                          : GradFn([&](Point p) { return kink.gradient(p); });
          FeFunction uh = lagrange_interpolate(w, mesh);
          row.errors = {l2_error(uh, w), h1_error(uh, gw)};
          break;
        }
        case StudyKind::L2Proj: {
          SpaceFn w = opts.custom_w ? opts.custom_w
                                    : boundary_bubble(spec.domain);
          GradFn gw = opts.custom_w ? opts.custom_grad_w
                                    : boundary_bubble_grad(spec.domain);
          FeFunction uh = l2_project(w, mesh, dofs, opts.cg_tol);
          row.errors = {l2_error(uh, w), h1_error(uh, gw)};
          break;
        }
        case StudyKind::Ritz: {
          SpaceFn w = opts.custom_w
                          ? opts.custom_w
                          : SpaceFn([&](Point p) { return kink.value(p); });
          GradFn gw = opts.custom_w
                          ? opts.custom_grad_w
                          : GradFn([&](Point p) { return kink.gradient(p); });
          FeFunction uh =
              ritz_project(w, gw, nullptr, mesh, dofs, spec, opts.cg_tol);
          row.errors = {l2_error(uh, w), h1_error(uh, gw)};
          break;
        }
        case StudyKind::Elliptic: {
          CsrMatrix A = assemble_stiffness(mesh, spec);
          Vector b =
              assemble_load(mesh, [&](Point p) { return kink.source(p); });
          auto [Ar, br] = apply_dirichlet(
              A, b, mesh, dofs, [&](Point p) { return kink.value(p); });
          auto [x, report] = cg_solve(Ar, br, opts.cg_tol);
          if (!report.converged) throw NotConverged("elliptic solve");
          FeFunction uh;
          uh.mesh = &mesh;
          uh.coeffs.resize(mesh.n_vertices());
          for (int v = 0; v < mesh.n_vertices(); ++v)
            uh.coeffs[v] =
                mesh.boundary_vertex[v] ? kink.value(mesh.vertices[v]) : 0.0;
          for (int fi = 0; fi < dofs.n_free; ++fi)
            uh.coeffs[dofs.free_to_vertex[fi]] = x[fi];
          row.errors = {l2_error(uh, [&](Point p) { return kink.value(p); }),
                        h1_error(uh, [&](Point p) { return kink.gradient(p); })};
          break;
        }
        case StudyKind::ParabolicSmooth: {
          ProblemSpec ps = spec;
          ps.beta1 = ps.beta2 = 1.0;
          SpaceFn bubble = boundary_bubble(spec.domain);
          ps.f = [&, bubble](Point p, double t) {
            double kx = M_PI / spec.domain.width(),
                   ky = M_PI / spec.domain.height();
            return (1.0 + (kx * kx + ky * ky) * t) * bubble(p);
          };
          ps.sigma = TimeMeasure::lebesgue(ps.T);
          ps.u0 = [](Point) { return 0.0; };
          int n_steps = opts.n_steps > 0
                            ? opts.n_steps << (2 * l)
                            : std::max(1, static_cast<int>(std::ceil(
                                              ps.T / (row.h * row.h))));
          row.dt = ps.T / n_steps;
          Trajectory uh =
              solve_forward(ps, mesh, dofs, n_steps, SolverOptions{opts.cg_tol});
          SpaceTimeRef exact{
              [&, bubble](Point p, double t) { return t * bubble(p); }, {}};
          row.errors = {error_norm(uh, exact, ErrorNorm::LinfL2)};
          break;
        }
        case StudyKind::ParabolicDirac: {
          ProblemSpec ps = spec;
          ps.f = dirac_profile;
          ps.sigma = TimeMeasure::dirac(spec.T / 2.0, 1.0, spec.T);
          ps.u0 = [](Point) { return 0.0; };
          int n_steps = n_steps_dirac << l;
          row.dt = ps.T / n_steps;
          Trajectory uh = solve_forward(ps, mesh, dofs, n_steps,
                                        SolverOptions{opts.cg_tol});
          row.errors = {error_norm(uh, reference, ErrorNorm::L2L2)};
          break;
        }
      }
    } catch (const Error&) {
      row.failed = true;
      row.errors.assign(table.norms.size(), std::nan(""));
    }
    row.seconds = seconds_since(t0);
    table.rows.push_back(row);
  }
  table.compute_eoc();
  return table;
}

void write_csv(const std::string& path, const ConvergenceTable& table) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << table.to_csv();
}

void write_loglog_svg(const std::string& path, const ConvergenceTable& table,
                      const std::string& norm) {
  size_t col = table.norms.size();
  for (size_t c = 0; c < table.norms.size(); ++c)
    if (table.norms[c] == norm) col = c;
  if (col == table.norms.size()) throw Error("no such norm column: " + norm);

  std::vector<std::pair<double, double>> pts;  // (h, error)
  for (auto& r : table.rows) {
    if (!r.failed && r.errors[col] > 0.0) pts.push_back({r.h, r.errors[col]});
  }
  if (pts.empty()) throw Error("nothing to plot for norm " + norm);

  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (auto& [h, e] : pts) {
    lx0 = std::min(lx0, std::log10(h));
    lx1 = std::max(lx1, std::log10(h));
    ly0 = std::min(ly0, std::log10(e));
    ly1 = std::max(ly1, std::log10(e));
  }
  if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1.0;
  ly0 -= 0.3;
  ly1 += 0.3;

  const double W = 560, H = 420, ml = 60, mr = 20, mt = 20, mb = 45;
  auto X = [&](double lx) {
    return ml + (lx - lx0) / (lx1 - lx0) * (W - ml - mr);
  };
  auto Y = [&](double ly) {
    return H - mb - (ly - ly0) / (ly1 - ly0) * (H - mt - mb);
  };

  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"#888\"/>\n";

  // reference slopes through the first data point
  auto slope_line = [&](double p, const char* color, const char* label) {
    double c = std::log10(pts.front().second) - p * std::log10(pts.front().first);
    os << "<line x1=\"" << X(lx0) << "\" y1=\"" << Y(p * lx0 + c) << "\" x2=\""
       << X(lx1) << "\" y2=\"" << Y(p * lx1 + c) << "\" stroke=\"" << color
       << "\" stroke-dasharray=\"5,4\"/>\n";
    os << "<text x=\"" << X(lx1) - 36 << "\" y=\"" << Y(p * lx1 + c) - 6
       << "\" font-size=\"12\" fill=\"" << color << "\">" << label
       << "</text>\n";
  };
  slope_line(1.0, "#b66", "h^1");
  slope_line(2.0, "#6b6", "h^2");

  os << "<polyline fill=\"none\" stroke=\"#226\" stroke-width=\"1.5\" points=\"";
  for (auto& [h, e] : pts) os << X(std::log10(h)) << "," << Y(std::log10(e)) << " ";
  os << "\"/>\n";
  for (auto& [h, e] : pts) {
    os << "<circle cx=\"" << X(std::log10(h)) << "\" cy=\"" << Y(std::log10(e))
       << "\" r=\"3.5\" fill=\"#226\"/>\n";
  }
  os << "<text x=\"" << W / 2 - 10 << "\" y=\"" << H - 12
     << "\" font-size=\"13\">h</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2 << "\" font-size=\"13\" transform=\"rotate(-90 14 "
     << H / 2 << ")\">" << norm << "</text>\n";
  os << "</svg>\n";
}

}  // namespace pifem
