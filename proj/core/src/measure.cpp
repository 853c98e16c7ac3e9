#include "pifem/measure.hpp"

#include <algorithm>
#include <cmath>

#include "pifem/errors.hpp"

namespace pifem {

TimeMeasure TimeMeasure::zero(double T) {
  TimeMeasure m;
  m.t_end = T;
  return m;
}

TimeMeasure TimeMeasure::dirac(double t, double weight, double T) {
  TimeMeasure m;
  m.t_end = T;
  m.atoms.push_back({t, weight});
  m.validate();
  return m;
}

TimeMeasure TimeMeasure::lebesgue(double T) {
  TimeMeasure m;
  m.t_end = T;
  m.density = [](double) { return 1.0; };
  return m;
}

void TimeMeasure::validate() const {
  if (t_end <= 0.0) throw BadInterval("measure interval end must be positive");
  double prev = -1.0;
  for (auto& a : atoms) {
    if (a.t < 0.0 || a.t > t_end)
      throw AtomOutsideInterval("atom outside [0, T]");
    if (a.t < prev) throw BadInterval("atoms must be sorted by time");
    prev = a.t;
  }
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (b <= a) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double total_variation(const TimeMeasure& sigma) {
  sigma.validate();
  double tv = 0.0;
  for (auto& a : sigma.atoms) tv += std::abs(a.weight);
  if (sigma.density) {
    tv += integrate([&](double t) { return std::abs(sigma.density(t)); }, 0.0,
                    sigma.t_end);
  }
  return tv;
}

StepMass step_mass(const TimeMeasure& sigma, double a, double b) {
  if (!(a >= 0.0 && a < b && b <= sigma.t_end * (1.0 + 1e-14)))
    throw BadInterval("step_mass: need 0 <= a < b <= T");
  StepMass s;
  for (auto& atom : sigma.atoms) {
    if (atom.t > a && atom.t <= b) s.atoms.push_back(atom);
  }
  if (sigma.density) s.density_mass = integrate(sigma.density, a, b);
  return s;
}

}  // namespace pifem
