#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pifem/analysis.hpp"
#include "pifem/errors.hpp"
#include "test_support.hpp"

using namespace pifem;
using namespace testsupport;

namespace {

Mesh circle_mesh(int refinements = 0) {
  InterfaceCurve curve = InterfaceCurve::circle({0, 0}, 0.5);
  Mesh m = build_interface_mesh({-1, -1, 1, 1}, curve, 0.25);
  for (int i = 0; i < refinements; ++i) m = refine(m, curve);
  return m;
}

Trajectory constant_trajectory(const Mesh& mesh, double value, int n_steps,
                               double T = 1.0) {
  Trajectory u;
  u.mesh = &mesh;
  for (int n = 0; n <= n_steps; ++n) {
    u.times.push_back(T * n / n_steps);
    u.coeffs.push_back(Vector(mesh.n_vertices(), value));
  }
  return u;
}

}  // namespace

TEST_CASE("kink solution: continuity and flux balance across the interface") {
  ExactSolutionKink kink{{0, 0}, 0.5, 1.0, 10.0};
  double r0 = kink.r0;
  CHECK(kink.flux_inner(r0) == doctest::Approx(3.0 * r0 * r0).epsilon(1e-15));
  CHECK(kink.flux_outer(r0) == doctest::Approx(3.0 * r0 * r0).epsilon(1e-15));

  for (int k = 0; k < 10000; ++k) {
    double theta = 2.0 * M_PI * k / 10000.0;
    Point n{std::cos(theta), std::sin(theta)};
    Point inner = (r0 * (1.0 - 1e-9)) * n;
    Point outer = (r0 * (1.0 + 1e-9)) * n;
    // value continuity across r = r0
    CHECK(std::abs(kink.value(inner) - kink.value(outer)) <= 1e-8);
    // flux continuity: beta du/dr = 3 r^2 on both sides
    double flux_in = kink.beta1 * dot(kink.gradient(inner), n);
    double flux_out = kink.beta2 * dot(kink.gradient(outer), n);
    CHECK(std::abs(flux_in - 3.0 * r0 * r0) <= 1e-7);
    CHECK(std::abs(flux_out - 3.0 * r0 * r0) <= 1e-7);
  }
  // the source is -9r regardless of side
  CHECK(kink.source({0.3, 0.0}) == doctest::Approx(-2.7).epsilon(1e-14));
  CHECK(kink.source({0.0, 0.8}) == doctest::Approx(-7.2).epsilon(1e-14));
}

TEST_CASE("error norms: reference equal to the trajectory gives zero") {
  Mesh mesh = circle_mesh();
  Trajectory u = constant_trajectory(mesh, 0.75, 4);
  SpaceTimeRef ref{[](Point, double) { return 0.75; }, {}};
  CHECK(error_norm(u, ref, ErrorNorm::L2L2) <= 1e-13);
  CHECK(error_norm(u, ref, ErrorNorm::LinfL2) <= 1e-13);
}

TEST_CASE("error norms: zero function against one on the unit-time box") {
  Mesh mesh = circle_mesh();
  Trajectory u = constant_trajectory(mesh, 0.0, 8);
  SpaceTimeRef ref{[](Point, double) { return 1.0; }, {}};
  // sqrt(area * T) = sqrt 4 = 2
  CHECK(error_norm(u, ref, ErrorNorm::L2L2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(error_norm(u, ref, ErrorNorm::LinfL2) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

namespace {

// Oracle for L2 errors: uniform sub x sub barycentric subdivision of every
// triangle, edge-midpoint (degree-2) rule on each small triangle.
// Independent of the production order-4 path.
double l2_error_oracle(const Mesh& mesh, const FeFunction& uh,
                       const SpaceFn& ref, int sub) {
  double acc = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto& tri = mesh.triangles[t];
    Point a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]],
          c = mesh.vertices[tri[2]];
    double area_small = mesh.triangle_area(t) / (sub * sub);
    auto add_small = [&](double ci, double cj, bool down) {
      // lattice corners of the small triangle, then its three edge midpoints
      double c0[2], c1[2], c2[2];
      if (!down) {
        c0[0] = ci; c0[1] = cj;
        c1[0] = ci + 1; c1[1] = cj;
        c2[0] = ci; c2[1] = cj + 1;
      } else {
        c0[0] = ci + 1; c0[1] = cj;
        c1[0] = ci + 1; c1[1] = cj + 1;
        c2[0] = ci; c2[1] = cj + 1;
      }
      double mids[3][2] = {{0.5 * (c0[0] + c1[0]), 0.5 * (c0[1] + c1[1])},
                           {0.5 * (c1[0] + c2[0]), 0.5 * (c1[1] + c2[1])},
                           {0.5 * (c2[0] + c0[0]), 0.5 * (c2[1] + c0[1])}};
      for (auto& m : mids) {
        double l1 = m[0] / sub, l2 = m[1] / sub, l0 = 1.0 - l1 - l2;
        Point p = l0 * a + l1 * b + l2 * c;
        double d = uh.value(t, {l0, l1, l2}) - ref(p);
        acc += (area_small / 3.0) * d * d;
      }
    };
    for (int i = 0; i < sub; ++i) {
      for (int j = 0; j < sub - i; ++j) {
        add_small(i, j, false);
        if (j < sub - i - 1) add_small(i, j, true);
      }
    }
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("interpolant L2 error matches a dense-quadrature oracle") {
  Mesh mesh = circle_mesh();

  SUBCASE("quadratic integrand: both rules near-exact, tight agreement") {
    SpaceFn w = [](Point p) { return p.x * p.x + 0.5 * p.x * p.y; };
    FeFunction uh = lagrange_interpolate(w, mesh);
    double err = l2_error(uh, w);  // order-4 rule is exact on this quartic
    double oracle = l2_error_oracle(mesh, uh, w, 64);
    CHECK(std::abs(err - oracle) <= 1e-8);
  }

  SUBCASE("kink integrand: agreement up to the interface sliver") {
    // inside interface triangles the true solution switches branch off the
    // chord, so a fixed-order rule carries a small geometric quadrature
    // error there; the oracle resolves it by subdivision
    ExactSolutionKink kink{{0, 0}, 0.5, 1.0, 10.0};
    SpaceFn w = [&](Point p) { return kink.value(p); };
    FeFunction uh = lagrange_interpolate(w, mesh);
    double err = l2_error(uh, w);
    double oracle = l2_error_oracle(mesh, uh, w, 64);
    CHECK(std::abs(err - oracle) <= 1e-2 * oracle);
  }
}

TEST_CASE("triangle inequality between trajectory errors") {
  Mesh mesh = circle_mesh();
  Trajectory u = constant_trajectory(mesh, 0.2, 4);
  Trajectory mid_t = constant_trajectory(mesh, 0.6, 4);
  SpaceTimeRef mid{[](Point, double) { return 0.6; }, {}};
  SpaceTimeRef ref{[](Point, double) { return 1.0; }, {}};
  double d_total = error_norm(u, ref, ErrorNorm::L2L2);
  double d_1 = error_norm(u, mid, ErrorNorm::L2L2);
  double d_2 = error_norm(mid_t, ref, ErrorNorm::L2L2);
  CHECK(d_total <= d_1 + d_2 + 1e-9);
}

TEST_CASE("coarse-vs-fine trajectory norm requires nested time grids") {
  Mesh coarse = circle_mesh();
  Mesh fine = refine(coarse, InterfaceCurve::circle({0, 0}, 0.5));
  Trajectory uc = constant_trajectory(coarse, 1.0, 4);
  Trajectory uf = constant_trajectory(fine, 1.0, 8);
  CHECK(error_norm(uc, uf, ErrorNorm::L2L2) <= 1e-12);

  Trajectory bad = constant_trajectory(fine, 1.0, 3);
  CHECK_THROWS_AS(error_norm(uc, bad, ErrorNorm::L2L2), GridMismatch);
}

TEST_CASE("coarse-vs-fine norm sees a known constant difference") {
  Mesh coarse = circle_mesh();
  Mesh fine = refine(coarse, InterfaceCurve::circle({0, 0}, 0.5));
  Trajectory uc = constant_trajectory(coarse, 0.0, 4);
  Trajectory uf = constant_trajectory(fine, 1.0, 8);
  CHECK(error_norm(uc, uf, ErrorNorm::L2L2) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("EOC definition and the exact marker in CSV output") {
  ConvergenceTable table;
  table.norms = {"l2"};
  for (int l = 0; l < 3; ++l) {
    ConvergenceRow row;
    row.level = l;
    row.h = 0.25 / (1 << l);
    row.n_dofs = 10 * (l + 1);
    row.errors = {0.01 / std::pow(4.0, l)};  // exact second order
    table.rows.push_back(row);
  }
  table.compute_eoc();
  CHECK(std::isnan(table.rows[0].eoc[0]));
  CHECK(table.rows[1].eoc[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(table.last_eoc("l2") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(table.last_eoc("nope"), Error);

  std::string csv = table.to_csv();
  CHECK(csv.find("level,h,dt,ndofs,l2,eoc_l2,seconds") == 0);
  CHECK(csv.find("exact") != std::string::npos);  // first-row EOC marker
}

TEST_CASE("interp study on an affine function reports exact errors") {
  StudyOptions opts;
  opts.levels = 3;
  opts.custom_w = [](Point p) { return 0.3 + 1.7 * p.x - 0.9 * p.y; };
  opts.custom_grad_w = [](Point) { return Point{1.7, -0.9}; };
  ConvergenceTable table = run_study(StudyKind::Interp, opts);
  for (auto& row : table.rows) {
    CHECK(!row.failed);
    for (double e : row.errors) CHECK(e <= 1e-12);
  }
  std::string csv = table.to_csv();
  CHECK(csv.find("exact") != std::string::npos);
}

TEST_CASE("elliptic interface solve converges at the projection rates") {
  StudyOptions opts;
  opts.spec.beta1 = 1.0;
  opts.spec.beta2 = 10.0;
  opts.levels = 3;
  ConvergenceTable table = run_study(StudyKind::Elliptic, opts);
  for (auto& row : table.rows) CHECK(!row.failed);
  CHECK(table.last_eoc("l2") >= 1.5);
  CHECK(table.last_eoc("h1") >= 0.75);
  // errors decrease monotonically
  for (size_t r = 1; r < table.rows.size(); ++r)
    CHECK(table.rows[r].errors[0] < table.rows[r - 1].errors[0]);
}

TEST_CASE("study kind names round-trip") {
  for (StudyKind k : {StudyKind::Interp, StudyKind::L2Proj, StudyKind::Ritz,
                      StudyKind::Elliptic, StudyKind::ParabolicSmooth,
                      StudyKind::ParabolicDirac})
    CHECK(study_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(study_kind_from_string("bogus"), ConfigError);
}

TEST_CASE("csv and svg writers produce well-formed artifacts") {
  StudyOptions opts;
  opts.levels = 3;
  ConvergenceTable table = run_study(StudyKind::Interp, opts);
  std::string csv_path = "analysis_artifact.csv";
  std::string svg_path = "analysis_artifact.svg";
  write_csv(csv_path, table);
  write_loglog_svg(svg_path, table, "l2");

  std::ifstream csv(csv_path);
  std::string head;
  std::getline(csv, head);
  CHECK(head == "level,h,dt,ndofs,l2,h1,eoc_l2,eoc_h1,seconds");
  std::ifstream svg(svg_path);
  std::stringstream ss;
  ss << svg.rdbuf();
  CHECK(ss.str().find("<svg") == 0);
  CHECK(ss.str().find("polyline") != std::string::npos);
  std::remove(csv_path.c_str());
  std::remove(svg_path.c_str());
}
