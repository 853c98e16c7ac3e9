#pragma once

#include <cmath>
#include <functional>

namespace pifem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dist(Point a, Point b) { return norm(a - b); }

/// Axis-aligned rectangular domain.
struct Bounds {
  double xmin, ymin, xmax, ymax;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diam() const { return std::hypot(width(), height()); }
  bool contains(Point p, double tol = 0.0) const {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol &&
           p.y <= ymax + tol;
  }
  /// Distance from an interior point to the rectangle boundary.
  double boundary_dist(Point p) const {
    double dx = std::min(p.x - xmin, xmax - p.x);
    double dy = std::min(p.y - ymin, ymax - p.y);
    return std::min(dx, dy);
  }
};

/// A closed C² curve given by a level-set function, negative on the inner
/// subdomain. Circles and ellipses come with exact projections; a generic
/// level set falls back to a Newton-type projection.
class InterfaceCurve {
 public:
  static InterfaceCurve circle(Point center, double radius);
  static InterfaceCurve ellipse(Point center, double rx, double ry);
  static InterfaceCurve from_levelset(std::function<double(Point)> levelset,
                                      double min_curvature_radius);

  double levelset(Point p) const { return levelset_(p); }
  /// Nearest point on the zero set.
  Point project(Point p) const { return project_(p); }
  /// Unsigned distance to the zero set.
  double distance(Point p) const { return dist(p, project_(p)); }
  double min_curvature_radius() const { return min_curvature_radius_; }

 private:
  InterfaceCurve() = default;
  std::function<double(Point)> levelset_;
  std::function<Point(Point)> project_;
  double min_curvature_radius_ = 0.0;
};

}  // namespace pifem
