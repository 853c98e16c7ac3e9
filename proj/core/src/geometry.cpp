#include "pifem/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pifem {

InterfaceCurve InterfaceCurve::circle(Point center, double radius) {
  InterfaceCurve c;
  c.levelset_ = [=](Point p) { return dist(p, center) - radius; };
  c.project_ = [=](Point p) {
    Point d = p - center;
    double r = norm(d);
    if (r < 1e-300) return center + Point{radius, 0.0};
    return center + (radius / r) * d;
  };
  c.min_curvature_radius_ = radius;
  return c;
}

InterfaceCurve InterfaceCurve::ellipse(Point center, double rx, double ry) {
  InterfaceCurve c;
  c.levelset_ = [=](Point p) {
    double u = (p.x - center.x) / rx;
    double v = (p.y - center.y) / ry;
    // scaled so that near the curve the value behaves like a distance
    double q = u * u + v * v;
    return 0.5 * std::min(rx, ry) * (q - 1.0);
  };
  c.project_ = [=](Point p) {
    double px = p.x - center.x, py = p.y - center.y;
    // Newton on the parameter of (rx cos t, ry sin t), distance stationarity
    double t = std::atan2(py * rx, px * ry);
    for (int it = 0; it < 50; ++it) {
      double ct = std::cos(t), st = std::sin(t);
      double ex = rx * ct, ey = ry * st;
      // d/dt |(ex,ey)-(px,py)|^2 / 2
      double g = -(ex - px) * rx * st + (ey - py) * ry * ct;
      double gp = -(ex - px) * rx * ct + rx * rx * st * st -
                  (ey - py) * ry * st + ry * ry * ct * ct;
      if (std::abs(gp) < 1e-300) break;
      double dt = g / gp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    return center + Point{rx * std::cos(t), ry * std::sin(t)};
  };
  c.min_curvature_radius_ =
      std::min(rx * rx / ry, ry * ry / rx);  // ends of the axes
  return c;
}

InterfaceCurve InterfaceCurve::from_levelset(
    std::function<double(Point)> levelset, double min_curvature_radius) {
  InterfaceCurve c;
  c.levelset_ = levelset;
  c.project_ = [levelset](Point p) {
    // damped Newton on phi(q)=0 along the finite-difference gradient
    Point q = p;
    const double eps = 1e-7;
    for (int it = 0; it < 100; ++it) {
      double phi = levelset(q);
      if (std::abs(phi) < 1e-14) break;
      double gx = (levelset({q.x + eps, q.y}) - levelset({q.x - eps, q.y})) /
                  (2 * eps);
      double gy = (levelset({q.x, q.y + eps}) - levelset({q.x, q.y - eps})) /
                  (2 * eps);
      double g2 = gx * gx + gy * gy;
      if (g2 < 1e-300) break;
      q = q - (phi / g2) * Point{gx, gy};
    }
    return q;
  };
  c.min_curvature_radius_ = min_curvature_radius;
  return c;
}

}  // namespace pifem
