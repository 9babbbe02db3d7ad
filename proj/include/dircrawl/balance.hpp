#pragma once

#include <utility>
#include <vector>

#include "dircrawl/body.hpp"
#include "dircrawl/friction.hpp"

namespace dircrawl {

enum class Regime { Sliding, StickSlip, WholeBodyStick };

const char* to_string(Regime regime);

/// Quasi-static velocity of the left end together with how the body meets the
/// substrate at that velocity.
struct BalanceSolution {
  double x1dot = 0.0;
  Regime regime = Regime::Sliding;
  /// Distance from 0 to the total force (point or interval) at x1dot.
  double residual = 0.0;
  /// Arc-length intervals where v vanishes identically.
  std::vector<std::pair<double, double>> stick_intervals;
  /// Uniform static force density the stuck intervals must supply; lies in
  /// [-tau_plus, tau_minus] whenever regime != Sliding.
  double static_force_density = 0.0;
};

/// Exact integral of the friction force over the current body.
ForceValue total_force(const FrictionLaw& law, const PiecewiseAffineShape& shape,
                       const ShapeRate& rate, double x1dot);

/// Solves 0 in F(x1dot). F is non-increasing and piecewise quadratic in x1dot
/// with breakpoints at the values -sdot at piece ends; brackets are found by
/// scanning breakpoints and the quadratic is solved exactly inside. When the
/// solution set is an interval the element closest to 0 is returned.
BalanceSolution solve_velocity(const FrictionLaw& law, const PiecewiseAffineShape& shape,
                               const ShapeRate& rate);

}  // namespace dircrawl
