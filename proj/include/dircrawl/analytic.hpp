#pragma once

#include <array>
#include <string>

#include "dircrawl/body.hpp"
#include "dircrawl/friction.hpp"

namespace dircrawl {

// Closed-form displacement and velocity formulas for breathers,
// constant-length crawlers, composite strides and square waves.

/// Roots of the breather force balance written as x1dot = C * ldot.
struct BreatherRoots {
  double c_minus = 0.0;
  double c_plus = 0.0;  // NaN on the linear branch (mu_1 == mu_2)
  double discriminant = 0.0;
  bool quadratic = false;
  /// True when c_minus lies in (-1, 0); the other root never does.
  bool admissible = false;
};

BreatherRoots breather_roots(const FrictionLaw& law, double ldot);

/// Velocity of the left end of a breather whose length changes at rate ldot.
double breather_velocity(const FrictionLaw& law, double ldot);

/// Net displacement over one period of the profile.
double breather_cycle_displacement(const FrictionLaw& law, const LengthProfile& profile);

/// Constant-length two-segment crawler: the force balance decouples and the
/// left end moves as a breather driven by l1dot.
double constant_length_velocity(const FrictionLaw& law, double L, double l1, double l1dot);

struct StrideDisplacement {
  double total = 0.0;
  std::array<double, 4> edges{};  // A->B, B->C, C->D, D->A
};

/// Pure dry or pure Newtonian substrates only (rate-independent); general
/// Bingham laws must go through engine::simulate.
StrideDisplacement composite_stride_displacement(const FrictionLaw& law, double lambda,
                                                 double delta, double h);

/// Upper bound on 2 alpha - 1 below which a dry stride moves backwards.
double dry_reversal_bound(double lambda, double delta, double h);
/// Upper bound on beta - 1 below which a Newtonian stride moves backwards.
double newtonian_reversal_bound(double lambda, double delta, double h);

bool negative_displacement_feasible(const FrictionLaw& law, double lambda, double delta, double h);

enum class WaveRegime { StickSlip, Sliding, Infeasible };

const char* to_string(WaveRegime regime);

struct WaveAdmissibility {
  WaveRegime regime = WaveRegime::Infeasible;
  /// Bound for the regime selected by the substrate yield ahead of the wave
  /// (stick-slip when that yield is non-zero, sliding otherwise).
  double delta_max = 0.0;
  double delta_max_stick_slip = 0.0;
  double delta_max_sliding = 0.0;
  std::string stick_slip_violation;  // empty when stick-slip is admissible
  std::string sliding_violation;     // empty when sliding is admissible
  std::string violated_condition;    // set when regime == Infeasible
};

WaveAdmissibility wave_admissibility(const FrictionLaw& law, double epsilon, double c, double delta,
                                     double L);

/// -epsilon * delta.
double stickslip_displacement(double epsilon, double delta);

/// Largest stick-slip displacement on a dry substrate, reached at delta_max.
double stickslip_max_displacement_dry(double alpha, double epsilon, double L);

/// Left-end velocity of a sliding crawler at time t in [0, (L + delta) / c).
double sliding_stage_velocity(const FrictionLaw& law, double epsilon, double c, double delta,
                              double L, double t);

struct SlidingDisplacement {
  double total = 0.0;
  double stage_a = 0.0;
  double stage_b = 0.0;
  double stage_c = 0.0;
  /// True when (1 + eps) mu- == mu+ (to tolerance) and the degenerate
  /// formulas were used.
  bool degenerate_branch = false;
};

SlidingDisplacement sliding_cycle_displacement(const FrictionLaw& law, double epsilon, double c,
                                               double delta, double L);

/// Sliding displacement on a purely Newtonian substrate with mu-/mu+ = beta^2.
double newtonian_sliding_displacement(double beta, double epsilon, double delta, double L);

}  // namespace dircrawl
