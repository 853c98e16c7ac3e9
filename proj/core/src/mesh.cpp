#include "pifem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <istream>
#include <sstream>

#include "pifem/errors.hpp"

namespace pifem {

namespace {

double signed_area(Point a, Point b, Point c) {
  return 0.5 * cross(b - a, c - a);
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

}  // namespace

double Mesh::triangle_area(int t) const {
  auto [i, j, k] = triangles[t];
  return signed_area(vertices[i], vertices[j], vertices[k]);
}

Point Mesh::barycenter(int t) const {
  auto [i, j, k] = triangles[t];
  return (1.0 / 3.0) * (vertices[i] + vertices[j] + vertices[k]);
}

QualityReport quality_report(const Mesh& mesh) {
  QualityReport q;
  q.n_vertices = mesh.n_vertices();
  q.n_triangles = mesh.n_triangles();
  q.n_interface_edges = static_cast<int>(mesh.interface_edges.size());
  q.h_min = std::numeric_limits<double>::infinity();
  q.min_angle = std::numeric_limits<double>::infinity();
  double min_inscribed = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto [i, j, k] = mesh.triangles[t];
    Point a = mesh.vertices[i], b = mesh.vertices[j], c = mesh.vertices[k];
    double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    double hk = std::max({la, lb, lc});
    q.h_max = std::max(q.h_max, hk);
    q.h_min = std::min(q.h_min, hk);
    double area = signed_area(a, b, c);
    double perimeter = la + lb + lc;
    min_inscribed = std::min(min_inscribed, 4.0 * area / perimeter);
    // angle at a is opposite to edge of length la, etc.
    auto angle = [](double opp, double s1, double s2) {
      double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
      return std::acos(std::clamp(cosv, -1.0, 1.0));
    };
    q.min_angle = std::min(
        {q.min_angle, angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
  }
  q.quasi_uniformity_ratio = q.h_max / min_inscribed;
  return q;
}

namespace {

// Rebuild the interface edge list: edges shared by two triangles with
// different subdomain tags. Both endpoints must lie on the curve.
void collect_interface_edges(Mesh& mesh) {
  std::map<std::pair<int, int>, std::pair<int, int>> edge_tags;  // edge -> (tag, count)
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_tags.find(key);
      if (it == edge_tags.end()) {
        edge_tags.emplace(key, std::make_pair(mesh.subdomain_tag[t], 1));
      } else {
        if (it->second.first != mesh.subdomain_tag[t]) it->second.first = -1;
        it->second.second++;
      }
    }
  }
  mesh.interface_edges.clear();
  for (auto& [key, val] : edge_tags) {
    if (val.second == 2 && val.first == -1) {
      if (!mesh.interface_vertex[key.first] ||
          !mesh.interface_vertex[key.second]) {
        throw DegenerateMesh(
            "subdomain boundary edge with an endpoint off the interface");
      }
      mesh.interface_edges.push_back({key.first, key.second});
    }
  }
}

void compute_h_max(Mesh& mesh) {
  mesh.h_max = 0.0;
  for (auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      mesh.h_max = std::max(
          mesh.h_max,
          dist(mesh.vertices[tri[e]], mesh.vertices[tri[(e + 1) % 3]]));
    }
  }
}

// Constrained Laplacian smoothing: a move to the neighbor average (projected
// back onto the curve for interface vertices) is kept only if it lowers the
// worst aspect ratio of the vertex star while preserving orientation and the
// subdomain tag of every incident triangle.
void smooth_interior(Mesh& mesh, const InterfaceCurve& curve, int sweeps) {
  int nv = mesh.n_vertices();
  std::vector<std::vector<int>> star(nv);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int e = 0; e < 3; ++e) star[mesh.triangles[t][e]].push_back(t);

  // shape score: aspect ratio h_K / inscribed-circle diameter (lower better)
  auto aspect_of = [&](int t) {
    Point a = mesh.vertices[mesh.triangles[t][0]];
    Point b = mesh.vertices[mesh.triangles[t][1]];
    Point c = mesh.vertices[mesh.triangles[t][2]];
    double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
    double area = 0.5 * cross(b - a, c - a);
    if (area <= 0.0) return std::numeric_limits<double>::infinity();
    double inscribed = 4.0 * area / (la + lb + lc);
    return std::max({la, lb, lc}) / inscribed;
  };
  auto star_ok = [&](int v) {
    for (int t : star[v]) {
      if (mesh.triangle_area(t) <= 0.0) return false;
      int want = curve.levelset(mesh.barycenter(t)) < 0.0 ? 1 : 2;
      if (mesh.subdomain_tag[t] != want) return false;
    }
    return true;
  };

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool moved = false;
    for (int v = 0; v < nv; ++v) {
      if (mesh.boundary_vertex[v]) continue;
      if (star[v].empty()) continue;
      Point avg{0, 0};
      int count = 0;
      for (int t : star[v]) {
        for (int e = 0; e < 3; ++e) {
          int w = mesh.triangles[t][e];
          if (w == v) continue;
          avg = avg + mesh.vertices[w];
          ++count;  // interior edges counted twice; fine for an average
        }
      }
      Point candidate = (1.0 / count) * avg;
      // interface vertices may only slide along the curve
      if (mesh.interface_vertex[v]) candidate = curve.project(candidate);
      double before = 0.0;
      for (int t : star[v]) before = std::max(before, aspect_of(t));
      Point old = mesh.vertices[v];
      mesh.vertices[v] = candidate;
      double after = 0.0;
      for (int t : star[v]) after = std::max(after, aspect_of(t));
      if (after < before - 1e-15 && star_ok(v)) {
        moved = true;
      } else {
        mesh.vertices[v] = old;
      }
    }
    if (!moved) break;
  }
}

// Fan-triangulate a small boundary polygon. Centers with a nonzero levelset
// sign are preferred so no triangle gets two edges on the interface chord.
void fan_triangulate(const std::vector<int>& poly,
                     const std::vector<Point>& pts,
                     const std::vector<int>& poly_sign, int tag,
                     std::vector<std::array<int, 3>>& out_tris,
                     std::vector<int>& out_tags) {
  int n = static_cast<int>(poly.size());
  if (n < 3) throw DegenerateMesh("cell fragment with fewer than 3 vertices");
  auto triangle_min_angle = [&](Point a, Point b, Point c) {
    double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
    double worst = std::numeric_limits<double>::infinity();
    // law of cosines per corner
    auto corner = [](double opp, double s1, double s2) {
      double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
      return std::acos(std::clamp(cosv, -1.0, 1.0));
    };
    worst = std::min({corner(la, lb, lc), corner(lb, la, lc),
                      corner(lc, la, lb)});
    return worst;
  };
  int best_center = -1;
  double best_min_area = -std::numeric_limits<double>::infinity();
  double best_min_angle = -1.0;
  bool best_nonzero = false;
  for (int c = 0; c < n; ++c) {
    double min_area = std::numeric_limits<double>::infinity();
    double min_angle = std::numeric_limits<double>::infinity();
    for (int f = 1; f + 1 < n; ++f) {
      int i = (c + f) % n, j = (c + f + 1) % n;
      min_area = std::min(min_area, signed_area(pts[poly[c]], pts[poly[i]],
                                                pts[poly[j]]));
      min_angle = std::min(min_angle, triangle_min_angle(pts[poly[c]],
                                                         pts[poly[i]],
                                                         pts[poly[j]]));
    }
    bool nonzero = poly_sign[c] != 0;
    bool better = false;
    if (min_area > 0.0) {
      if (best_min_area <= 0.0) better = true;
      else if (nonzero && !best_nonzero) better = true;
      else if (nonzero == best_nonzero && min_angle > best_min_angle)
        better = true;
    } else if (best_min_area <= 0.0 && min_area > best_min_area) {
      better = true;
    }
    if (better) {
      best_center = c;
      best_min_area = min_area;
      best_min_angle = min_angle;
      best_nonzero = nonzero;
    }
  }
  if (best_min_area <= 0.0) {
    std::string msg = "cell fragment has no valid fan triangulation:";
    char buf[64];
    for (int c = 0; c < n; ++c) {
      std::snprintf(buf, sizeof(buf), " (%.6g,%.6g|%d)", pts[poly[c]].x,
                    pts[poly[c]].y, poly_sign[c]);
      msg += buf;
    }
    throw DegenerateMesh(msg);
  }
  for (int f = 1; f + 1 < n; ++f) {
    int i = (best_center + f) % n, j = (best_center + f + 1) % n;
    out_tris.push_back({poly[best_center], poly[i], poly[j]});
    out_tags.push_back(tag);
  }
}

}  // namespace

Mesh build_interface_mesh(Bounds domain, const InterfaceCurve& curve,
                          double target_h) {
  if (target_h <= 0.0) throw Error("target_h must be positive");
  if (target_h > 0.5 * curve.min_curvature_radius() * (1.0 + 1e-12)) {
    throw DegenerateMesh(
        "target_h exceeds half the minimum curvature radius of the interface");
  }

  // The curve must stay clear of the domain boundary.
  {
    const int n_samples = 256;
    double min_clearance = std::numeric_limits<double>::infinity();
    auto probe = [&](Point p) {
      Point q = curve.project(p);
      min_clearance = std::min(min_clearance, domain.boundary_dist(q));
    };
    for (int i = 0; i <= n_samples; ++i) {
      double sx = domain.xmin + domain.width() * i / n_samples;
      double sy = domain.ymin + domain.height() * i / n_samples;
      probe({sx, domain.ymin});
      probe({sx, domain.ymax});
      probe({domain.xmin, sy});
      probe({domain.xmax, sy});
    }
    if (min_clearance < 2.0 * target_h) {
      throw CurveTouchesBoundary(
          "interface comes within 2*target_h of the domain boundary");
    }
  }

  int nx = std::max(2, static_cast<int>(std::ceil(domain.width() / target_h)));
  int ny = std::max(2, static_cast<int>(std::ceil(domain.height() / target_h)));
  double hx = domain.width() / nx, hy = domain.height() / ny;
  double snap_dist = 0.35 * std::min(hx, hy);

  Mesh mesh;
  mesh.bounds = domain;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  mesh.vertices.resize((nx + 1) * (ny + 1));
  mesh.boundary_vertex.assign(mesh.vertices.size(), 0);
  mesh.interface_vertex.assign(mesh.vertices.size(), 0);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      Point p{domain.xmin + i * hx, domain.ymin + j * hy};
      bool on_boundary = (i == 0 || i == nx || j == 0 || j == ny);
      int v = vid(i, j);
      if (!on_boundary && curve.distance(p) <= snap_dist) {
        p = curve.project(p);
        mesh.interface_vertex[v] = 1;
      }
      mesh.vertices[v] = p;
      mesh.boundary_vertex[v] = on_boundary ? 1 : 0;
    }
  }

  auto vertex_sign = [&](int v) {
    if (mesh.interface_vertex[v]) return 0;
    return sign_of(curve.levelset(mesh.vertices[v]));
  };

  // One cut vertex per grid edge whose endpoints have strictly opposite
  // signs: bisect the levelset along the chord, then project onto the curve.
  std::map<std::pair<int, int>, int> cut_on_edge;
  auto cut_vertex = [&](int a, int b) -> int {
    auto key = std::minmax(a, b);
    auto it = cut_on_edge.find(key);
    if (it != cut_on_edge.end()) return it->second;
    Point pa = mesh.vertices[key.first], pb = mesh.vertices[key.second];
    double fa = curve.levelset(pa);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 80; ++iter) {
      double mid = 0.5 * (lo + hi);
      double fm = curve.levelset(pa + mid * (pb - pa));
      if ((fm < 0.0) == (fa < 0.0)) lo = mid; else hi = mid;
    }
    Point q = curve.project(pa + 0.5 * (lo + hi) * (pb - pa));
    int v = mesh.n_vertices();
    mesh.vertices.push_back(q);
    mesh.boundary_vertex.push_back(0);
    mesh.interface_vertex.push_back(1);
    cut_on_edge.emplace(key, v);
    return v;
  };

  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i < nx) {
        int a = vid(i, j), b = vid(i + 1, j);
        if (vertex_sign(a) * vertex_sign(b) < 0) cut_vertex(a, b);
      }
      if (j < ny) {
        int a = vid(i, j), b = vid(i, j + 1);
        if (vertex_sign(a) * vertex_sign(b) < 0) cut_vertex(a, b);
      }
    }
  }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int corners[4] = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1),
                        vid(i, j + 1)};
      // ccw boundary cycle of the cell: corners plus cut points
      std::vector<int> cycle;
      for (int e = 0; e < 4; ++e) {
        int a = corners[e], b = corners[(e + 1) % 4];
        cycle.push_back(a);
        auto it = cut_on_edge.find(std::minmax(a, b));
        if (it != cut_on_edge.end()) cycle.push_back(it->second);
      }
      int n = static_cast<int>(cycle.size());
      std::vector<int> sgn(n);
      for (int k = 0; k < n; ++k) {
        sgn[k] = mesh.interface_vertex[cycle[k]]
                     ? 0
                     : sign_of(curve.levelset(mesh.vertices[cycle[k]]));
      }

      // positions of sign changes in the nonzero subsequence
      std::vector<int> nonzero;
      for (int k = 0; k < n; ++k)
        if (sgn[k] != 0) nonzero.push_back(k);
      std::vector<std::pair<int, int>> change_gaps;  // (from idx, to idx)
      for (size_t m = 0; m < nonzero.size(); ++m) {
        int a = nonzero[m], b = nonzero[(m + 1) % nonzero.size()];
        if (sgn[a] != sgn[b]) change_gaps.push_back({a, b});
      }

      int cell_tag;
      if (!nonzero.empty()) {
        cell_tag = sgn[nonzero.front()] < 0 ? 1 : 2;
      } else {
        cell_tag = curve.levelset((1.0 / n) *
                                  [&] {
                                    Point s{0, 0};
                                    for (int k = 0; k < n; ++k)
                                      s = s + mesh.vertices[cycle[k]];
                                    return s;
                                  }()) < 0.0
                       ? 1
                       : 2;
      }

      if (change_gaps.empty()) {
        fan_triangulate(cycle, mesh.vertices, sgn, cell_tag, mesh.triangles,
                        mesh.subdomain_tag);
      } else if (change_gaps.size() == 2) {
        // chord endpoint = first zero entry after the gap start
        auto separator = [&](std::pair<int, int> gap) {
          for (int k = (gap.first + 1) % n; k != gap.second; k = (k + 1) % n) {
            if (sgn[k] == 0) return k;
          }
          throw DegenerateMesh("sign change without an interface point");
        };
        int sa = separator(change_gaps[0]);
        int sb = separator(change_gaps[1]);
        auto chain = [&](int from, int to) {
          std::vector<int> poly, psign;
          for (int k = from;; k = (k + 1) % n) {
            poly.push_back(cycle[k]);
            psign.push_back(sgn[k]);
            if (k == to) break;
          }
          int tag = 0;
          for (int s : psign)
            if (s != 0) { tag = s < 0 ? 1 : 2; break; }
          if (tag == 0) throw DegenerateMesh("interface chain without a sign");
          fan_triangulate(poly, mesh.vertices, psign, tag, mesh.triangles,
                          mesh.subdomain_tag);
        };
        chain(sa, sb);
        chain(sb, sa);
      } else {
        throw DegenerateMesh(
            "interface crosses a background cell more than once; decrease "
            "target_h");
      }
    }
  }

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (mesh.triangle_area(t) <= 0.0)
      throw DegenerateMesh("non-positive triangle area after projection");
  }
  smooth_interior(mesh, curve, 30);
  compute_h_max(mesh);
  collect_interface_edges(mesh);
  return mesh;
}

Mesh refine(const Mesh& mesh, const InterfaceCurve& curve) {
  Mesh out;
  out.bounds = mesh.bounds;
  out.vertices = mesh.vertices;
  out.boundary_vertex = mesh.boundary_vertex;
  out.interface_vertex = mesh.interface_vertex;

  std::map<std::pair<int, int>, int> interface_edge_set;
  for (auto& e : mesh.interface_edges)
    interface_edge_set[std::minmax(e[0], e[1])] = 1;

  const double tol = 1e-12 * mesh.diam();
  auto on_same_side = [&](Point a, Point b, Point m) {
    const Bounds& d = mesh.bounds;
    auto near = [&](double u, double v) { return std::abs(u - v) <= tol; };
    return (near(a.x, d.xmin) && near(b.x, d.xmin) && near(m.x, d.xmin)) ||
           (near(a.x, d.xmax) && near(b.x, d.xmax) && near(m.x, d.xmax)) ||
           (near(a.y, d.ymin) && near(b.y, d.ymin) && near(m.y, d.ymin)) ||
           (near(a.y, d.ymax) && near(b.y, d.ymax) && near(m.y, d.ymax));
  };

  std::map<std::pair<int, int>, int> midpoint;
  auto edge_midpoint = [&](int a, int b) -> int {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Point pa = mesh.vertices[key.first], pb = mesh.vertices[key.second];
    Point m = 0.5 * (pa + pb);
    bool on_interface = interface_edge_set.count(key) > 0;
    bool on_boundary = false;
    if (on_interface) {
      m = curve.project(m);
    } else if (mesh.boundary_vertex[key.first] &&
               mesh.boundary_vertex[key.second] && on_same_side(pa, pb, m)) {
      on_boundary = true;
    }
    int v = out.n_vertices();
    out.vertices.push_back(m);
    out.boundary_vertex.push_back(on_boundary ? 1 : 0);
    out.interface_vertex.push_back(on_interface ? 1 : 0);
    midpoint.emplace(key, v);
    return v;
  };

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto [i, j, k] = mesh.triangles[t];
    int mij = edge_midpoint(i, j);
    int mjk = edge_midpoint(j, k);
    int mki = edge_midpoint(k, i);
    int tag = mesh.subdomain_tag[t];
    out.triangles.push_back({i, mij, mki});
    out.triangles.push_back({mij, j, mjk});
    out.triangles.push_back({mki, mjk, k});
    out.triangles.push_back({mij, mjk, mki});
    for (int c = 0; c < 4; ++c) out.subdomain_tag.push_back(tag);
  }

  for (int t = 0; t < out.n_triangles(); ++t) {
    if (out.triangle_area(t) <= 0.0)
      throw DegenerateMesh(
          "interface projection inverted a triangle during refinement");
  }
  compute_h_max(out);
  collect_interface_edges(out);
  return out;
}

namespace {

std::array<double, 3> barycentric(const Mesh& mesh, int t, Point p) {
  auto [i, j, k] = mesh.triangles[t];
  Point a = mesh.vertices[i], b = mesh.vertices[j], c = mesh.vertices[k];
  double denom = cross(b - a, c - a);
  double b1 = cross(p - a, c - a) / denom;
  double b2 = cross(b - a, p - a) / denom;
  return {1.0 - b1 - b2, b1, b2};
}

Location best_location(const Mesh& mesh, Point p,
                       const std::vector<int>& candidates) {
  Location best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int t : candidates) {
    auto b = barycentric(mesh, t, p);
    double mn = std::min({b[0], b[1], b[2]});
    if (mn > best_min) {
      best_min = mn;
      best = {t, b};
    }
  }
  if (best_min < -1e-12) best.triangle = -1;
  return best;
}

}  // namespace

Location locate_point(const Mesh& mesh, Point p) {
  std::vector<int> all(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) all[t] = t;
  Location loc = best_location(mesh, p, all);
  if (loc.triangle < 0) throw PointOutsideDomain("point not in any triangle");
  return loc;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  int n = std::max(1, static_cast<int>(std::sqrt(mesh.n_triangles() / 2.0)));
  nx_ = n;
  ny_ = n;
  cell_w_ = mesh.bounds.width() / nx_;
  cell_h_ = mesh.bounds.height() / ny_;
  bins_.resize(static_cast<size_t>(nx_) * ny_);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto [i, j, k] = mesh.triangles[t];
    Point a = mesh.vertices[i], b = mesh.vertices[j], c = mesh.vertices[k];
    double xmin = std::min({a.x, b.x, c.x}), xmax = std::max({a.x, b.x, c.x});
    double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
    int i0 = std::clamp(static_cast<int>((xmin - mesh.bounds.xmin) / cell_w_), 0, nx_ - 1);
    int i1 = std::clamp(static_cast<int>((xmax - mesh.bounds.xmin) / cell_w_), 0, nx_ - 1);
    int j0 = std::clamp(static_cast<int>((ymin - mesh.bounds.ymin) / cell_h_), 0, ny_ - 1);
    int j1 = std::clamp(static_cast<int>((ymax - mesh.bounds.ymin) / cell_h_), 0, ny_ - 1);
    for (int jj = j0; jj <= j1; ++jj)
      for (int ii = i0; ii <= i1; ++ii)
        bins_[static_cast<size_t>(jj) * nx_ + ii].push_back(t);
  }
}

Location PointLocator::locate(Point p) const {
  const Mesh& mesh = *mesh_;
  int ci = std::clamp(static_cast<int>((p.x - mesh.bounds.xmin) / cell_w_), 0, nx_ - 1);
  int cj = std::clamp(static_cast<int>((p.y - mesh.bounds.ymin) / cell_h_), 0, ny_ - 1);
  for (int ring = 0; ring <= std::max(nx_, ny_); ++ring) {
    std::vector<int> candidates;
    for (int jj = std::max(0, cj - ring); jj <= std::min(ny_ - 1, cj + ring); ++jj) {
      for (int ii = std::max(0, ci - ring); ii <= std::min(nx_ - 1, ci + ring); ++ii) {
        if (ring > 0 && std::abs(ii - ci) < ring && std::abs(jj - cj) < ring)
          continue;
        auto& bin = bins_[static_cast<size_t>(jj) * nx_ + ii];
        candidates.insert(candidates.end(), bin.begin(), bin.end());
      }
    }
    if (candidates.empty()) continue;
    Location loc = best_location(mesh, p, candidates);
    if (loc.triangle >= 0) return loc;
    if (ring > 1) break;  // genuinely outside, do not scan the whole grid
  }
  throw PointOutsideDomain("point not in any triangle");
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[128];
  os << "vertices " << mesh.n_vertices() << " triangles " << mesh.n_triangles()
     << "\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    int flags = (mesh.boundary_vertex[v] ? 1 : 0) |
                (mesh.interface_vertex[v] ? 2 : 0);
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", mesh.vertices[v].x,
                  mesh.vertices[v].y, flags);
    os << buf;
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto& tri = mesh.triangles[t];
    os << tri[0] << " " << tri[1] << " " << tri[2] << " "
       << mesh.subdomain_tag[t] << "\n";
  }
}

Mesh read_mesh(std::istream& is) {
  std::string kw1, kw2;
  int nv = 0, nt = 0;
  if (!(is >> kw1 >> nv >> kw2 >> nt) || kw1 != "vertices" ||
      kw2 != "triangles") {
    throw Error("mesh file: bad header");
  }
  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.boundary_vertex.resize(nv);
  mesh.interface_vertex.resize(nv);
  for (int v = 0; v < nv; ++v) {
    int flags;
    if (!(is >> mesh.vertices[v].x >> mesh.vertices[v].y >> flags))
      throw Error("mesh file: truncated vertex list");
    mesh.boundary_vertex[v] = (flags & 1) ? 1 : 0;
    mesh.interface_vertex[v] = (flags & 2) ? 1 : 0;
  }
  mesh.triangles.resize(nt);
  mesh.subdomain_tag.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto& tri = mesh.triangles[t];
    if (!(is >> tri[0] >> tri[1] >> tri[2] >> mesh.subdomain_tag[t]))
      throw Error("mesh file: truncated triangle list");
  }
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (auto& p : mesh.vertices) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  mesh.bounds = {xmin, ymin, xmax, ymax};
  compute_h_max(mesh);
  collect_interface_edges(mesh);
  return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_mesh(is);
}

}  // namespace pifem
