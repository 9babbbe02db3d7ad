#pragma once

#include <utility>

namespace dircrawl {

/// Directional Bingham-type substrate law.
///
/// Force per unit current length exerted on a point sliding with velocity v:
///   v < 0 :  tau_minus - mu_minus * v
///   v = 0 :  any value in [-tau_plus, tau_minus]
///   v > 0 : -tau_plus  - mu_plus  * v
/// All four parameters are non-negative and not all zero.
class FrictionLaw {
 public:
  FrictionLaw(double tau_minus, double tau_plus, double mu_minus, double mu_plus);

  static FrictionLaw dry(double tau_minus, double tau_plus) {
    return {tau_minus, tau_plus, 0.0, 0.0};
  }
  static FrictionLaw newtonian(double mu_minus, double mu_plus) {
    return {0.0, 0.0, mu_minus, mu_plus};
  }

  double tau_minus() const noexcept { return tau_minus_; }
  double tau_plus() const noexcept { return tau_plus_; }
  double mu_minus() const noexcept { return mu_minus_; }
  double mu_plus() const noexcept { return mu_plus_; }

  bool is_dry() const noexcept { return mu_minus_ == 0.0 && mu_plus_ == 0.0; }
  bool is_newtonian() const noexcept { return tau_minus_ == 0.0 && tau_plus_ == 0.0; }

  bool operator==(const FrictionLaw&) const = default;

 private:
  double tau_minus_;
  double tau_plus_;
  double mu_minus_;
  double mu_plus_;
};

/// A force density value: a single number, or the closed static range at v=0.
struct ForceValue {
  double lo = 0.0;
  double hi = 0.0;
  bool set_valued = false;

  static ForceValue point(double f) { return {f, f, false}; }
  static ForceValue interval(double lo, double hi) { return {lo, hi, true}; }

  bool contains(double f) const noexcept { return lo <= f && f <= hi; }
  double width() const noexcept { return hi - lo; }

  ForceValue& operator+=(const ForceValue& other) noexcept {
    lo += other.lo;
    hi += other.hi;
    set_valued = set_valued || other.set_valued;
    return *this;
  }
};

/// Signed yield and viscosity on the two sides of the zero-velocity point of a
/// deforming segment; side 1 is nearer the left end.
struct DirectionalPair {
  double tau_1;
  double mu_1;
  double tau_2;
  double mu_2;
};

ForceValue evaluate(const FrictionLaw& law, double v);

FrictionLaw scale(const FrictionLaw& law, double k);

/// False iff the law is odd in the velocity.
bool is_directional(const FrictionLaw& law);

/// Orients the axis so that the positive direction offers the least
/// resistance: mu_minus > mu_plus, or mu_minus == mu_plus and
/// tau_minus >= tau_plus. Returns the law seen in that axis and whether the
/// axis was reversed.
std::pair<FrictionLaw, bool> normalize_orientation(const FrictionLaw& law);

DirectionalPair directional_pair(const FrictionLaw& law, bool elongating);

/// tau_minus / (tau_minus + tau_plus).
double alpha(const FrictionLaw& law);

/// sqrt(mu_minus / mu_plus).
double beta(const FrictionLaw& law);

}  // namespace dircrawl
