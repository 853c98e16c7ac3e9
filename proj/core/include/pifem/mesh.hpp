#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pifem/geometry.hpp"

namespace pifem {

/// Conforming triangulation of a rectangle, fitted to an interface curve:
/// every triangle lies on one side of the interface polygon, whose vertices
/// all sit on the curve.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // ccw vertex indices
  std::vector<int> subdomain_tag;             // 1 (inner) or 2 (outer)
  std::vector<std::uint8_t> boundary_vertex;
  std::vector<std::uint8_t> interface_vertex;
  std::vector<std::array<int, 2>> interface_edges;  // endpoints on the curve
  double h_max = 0.0;
  Bounds bounds{};

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  double diam() const { return bounds.diam(); }
  double triangle_area(int t) const;
  Point barycenter(int t) const;
};

struct QualityReport {
  double h_max = 0.0;
  double h_min = 0.0;
  double min_angle = 0.0;               // radians
  double quasi_uniformity_ratio = 0.0;  // max_K h_max / (inscribed diameter)
  int n_vertices = 0;
  int n_triangles = 0;
  int n_interface_edges = 0;
};

QualityReport quality_report(const Mesh& mesh);

/// Structured background grid on the rectangle; vertices near the curve are
/// snapped onto it and cut cells are retriangulated along the chord.
Mesh build_interface_mesh(Bounds domain, const InterfaceCurve& curve,
                          double target_h);

/// Regular 4-split; midpoints of interface edges are projected back onto the
/// curve, so successive meshes are non-nested near the interface.
Mesh refine(const Mesh& mesh, const InterfaceCurve& curve);

struct Location {
  int triangle = -1;
  std::array<double, 3> bary{};
};

/// Linear scan over all triangles. For bulk queries use PointLocator.
Location locate_point(const Mesh& mesh, Point p);

/// Uniform-bin spatial index over triangle bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);
  Location locate(Point p) const;
  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  int nx_, ny_;
  double cell_w_, cell_h_;
  std::vector<std::vector<int>> bins_;
};

// Plain-text export/import: header `vertices N triangles M`, then one vertex
// per line (x y flags) and one triangle per line (i j k tag).
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

}  // namespace pifem
