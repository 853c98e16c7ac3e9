#pragma once

#include <functional>
#include <vector>

namespace pifem {

/// Real regular Borel measure on [0, T], represented as point atoms plus an
/// absolutely continuous density. Singular-continuous parts are out of scope.
struct TimeMeasure {
  struct Atom {
    double t;
    double weight;
  };

  std::vector<Atom> atoms;                  // sorted by time, within [0, T]
  std::function<double(double)> density;    // may be empty
  double t_end = 1.0;

  static TimeMeasure zero(double T);
  static TimeMeasure dirac(double t, double weight, double T);
  static TimeMeasure lebesgue(double T);  // density == 1

  void validate() const;  // throws AtomOutsideInterval / BadInterval
};

/// Sum of |atom weights| plus the integral of |density|.
double total_variation(const TimeMeasure& sigma);

/// Restriction of the measure to the half-open interval (a, b]: atoms at
/// t == a are excluded, atoms at t == b included.
struct StepMass {
  std::vector<TimeMeasure::Atom> atoms;
  double density_mass = 0.0;
};
StepMass step_mass(const TimeMeasure& sigma, double a, double b);

/// Adaptive Simpson quadrature on [a, b], absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

}  // namespace pifem
