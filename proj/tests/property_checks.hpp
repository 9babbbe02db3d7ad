#pragma once

// Randomized invariant checks shared by the property tests and the
// acceptance runner. Each returns the first counterexample it meets.

#include <cmath>
#include <sstream>
#include <string>

#include "dircrawl/analytic.hpp"
#include "dircrawl/balance.hpp"
#include "dircrawl/engine.hpp"
#include "dircrawl/error.hpp"
#include "oracles.hpp"

namespace props {

using namespace dircrawl;

struct Outcome {
  bool ok = true;
  int cases = 0;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

inline std::string law_str(const dircrawl::FrictionLaw& f) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << f.tau_minus() << ", " << f.tau_plus() << ", " << f.mu_minus() << ", " << f.mu_plus() << ")";
  return os.str();
}

/// Monotone graph, dissipation and scale equivariance of the force law.
inline Outcome friction_laws(int samples, std::uint64_t seed) {
  using namespace dircrawl;
  oracle::Gen g(seed);
  Outcome out;
  for (int i = 0; i < samples && out.ok; ++i, ++out.cases) {
    const auto law = g.any_law();
    const double v1 = g.coin(0.1) ? 0.0 : g.uniform(-10, 10);
    const double v2 = g.coin(0.1) ? 0.0 : g.uniform(-10, 10);
    const auto f1 = evaluate(law, std::min(v1, v2));
    const auto f2 = evaluate(law, std::max(v1, v2));
    if (v1 != v2 && f1.lo < f2.hi) out.fail("monotonicity " + law_str(law));
    if (v1 != 0.0 && evaluate(law, v1).lo * v1 > 0.0) out.fail("dissipation " + law_str(law));
    const double k = g.log_uniform(1e-3, 1e3);
    const auto fs = evaluate(scale(law, k), v1);
    const auto f = evaluate(law, v1);
    if (!oracle::close_rel(fs.lo, k * f.lo, 1e-14, 1e-300) || !oracle::close_rel(fs.hi, k * f.hi, 1e-14, 1e-300)) {
      out.fail("scaling " + law_str(law));
    }
    if (!is_directional(law) && v1 != 0.0) {
      if (evaluate(law, -v1).lo != -evaluate(law, v1).lo) out.fail("odd law not odd " + law_str(law));
    }
  }
  return out;
}

inline dircrawl::GaitProgram random_gait(oracle::Gen& g) {
  using namespace dircrawl;
  switch (g.pick(4)) {
    case 0: return Breather::sine_squared(1.0, g.uniform(-0.8, 2.0), g.uniform(0.5, 2.0));
    case 1: {
      const double X = g.uniform(0.2, 0.8);
      return ConstantLength{1.0, X, LengthProfile::sine_squared(X, g.uniform(-0.9, 0.9) * std::min(X, 1 - X), 1.0)};
    }
    case 2: return CompositeStride{g.uniform(0.1, 1.0), g.uniform(0.1, 1.0), g.uniform(1.2, 3.0), 1.0};
    default: return SquareWave{1.0, g.uniform(0.05, 0.9), g.coin() ? g.uniform(0.1, 2.0) : -g.uniform(0.1, 0.9), 1.0};
  }
}

/// Velocities do not change when the law is multiplied by a positive factor.
inline Outcome scale_invariance(int samples, std::uint64_t seed) {
  using namespace dircrawl;
  oracle::Gen g(seed);
  Outcome out;
  for (int i = 0; i < samples && out.ok; ++i, ++out.cases) {
    const auto law = g.any_law();
    const double k = g.log_uniform(1e-3, 1e3);
    const auto scaled = scale(law, k);
    const double ldot = g.coin() ? g.uniform(0.01, 10) : -g.uniform(0.01, 10);
    if (!oracle::close_rel(breather_velocity(law, ldot), breather_velocity(scaled, ldot), 1e-12, 1e-15)) {
      out.fail("breather_velocity " + law_str(law));
    }
    const auto gait = random_gait(g);
    const double t = g.uniform(0.0, period(gait));
    try {
      const auto a = solve_velocity(law, shape_at(gait, t), rate_at(gait, t));
      const auto b = solve_velocity(scaled, shape_at(gait, t), rate_at(gait, t));
      if (!oracle::close_rel(a.x1dot, b.x1dot, 1e-12, 1e-12)) out.fail(std::string("solve_velocity ") + gait_kind(gait) + " " + law_str(law) + " " + oracle::fmt17(a.x1dot) + " vs " + oracle::fmt17(b.x1dot) + " t=" + std::to_string(t));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSubstrate) throw;
      bool also = false;
      try {
        solve_velocity(scaled, shape_at(gait, t), rate_at(gait, t));
      } catch (const Error&) {
        also = true;
      }
      if (!also) out.fail("degeneracy not scale invariant " + law_str(law));
    }
  }
  return out;
}

/// Reciprocal gaits on odd laws go nowhere.
inline Outcome non_directional_null(int samples, std::uint64_t seed) {
  using namespace dircrawl;
  oracle::Gen g(seed);
  Outcome out;
  for (int i = 0; i < samples && out.ok; ++i, ++out.cases) {
    const double tau = g.coin(0.3) ? 0.0 : g.log_uniform(1e-2, 1e2);
    const double mu = tau == 0.0 || g.coin(0.3) ? g.log_uniform(1e-2, 1e2) : 0.0;
    const FrictionLaw law(tau, tau, mu, mu);
    const auto gait = [&]() -> GaitProgram {
      switch (g.pick(3)) {
        case 0: return Breather::sine_squared(1.0, g.uniform(-0.8, 2.0), g.uniform(0.5, 2.0));
        case 1: {
          const double X = g.uniform(0.2, 0.8);
          return ConstantLength{1.0, X, LengthProfile::triangle(X, 0.9 * std::min(X, 1 - X), 1.0, g.uniform(0.2, 0.8))};
        }
        default: {
          const double l1 = g.uniform(0.3, 1.0), l2 = g.uniform(0.3, 1.0);
          return TwoSegmentPath{1.0, 0.5, 1.0, {{l1, l2}, {l2, l1 + 0.2}, {2 * l1, 2 * l2}, {l2, l1 + 0.2}}};
        }
      }
    }();
    const double d = cycle_displacement(law, gait).net_displacement;
    if (!(std::abs(d) <= 1e-9)) out.fail(std::string(gait_kind(gait)) + " moved " + std::to_string(d) + " on " + law_str(law));
  }
  return out;
}

/// Dry and Newtonian displacements ignore the speed of the gait; a generic
/// Bingham law does not.
inline Outcome rate_dependence(int samples, std::uint64_t seed) {
  using namespace dircrawl;
  oracle::Gen g(seed);
  Outcome out;
  auto with_period = [](const GaitProgram& gait, double T) -> GaitProgram {
    if (const auto* b = std::get_if<Breather>(&gait)) return Breather{b->L, b->profile.with_period(T)};
    if (const auto* c = std::get_if<ConstantLength>(&gait)) return ConstantLength{c->L, c->Xstar, c->l1.with_period(T)};
    if (const auto* s = std::get_if<CompositeStride>(&gait)) return CompositeStride{s->lambda, s->delta, s->h, T};
    const auto& w = std::get<SquareWave>(gait);
    const double ratio = T / w.period();
    return SquareWave{w.L, w.delta, w.epsilon, w.c / ratio};
  };
  for (int i = 0; i < samples && out.ok; ++i, ++out.cases) {
    const FrictionLaw law = g.coin() ? FrictionLaw::dry(g.log_uniform(0.1, 10), g.log_uniform(0.1, 10))
                                     : FrictionLaw::newtonian(g.log_uniform(0.1, 10), g.log_uniform(0.1, 10));
    GaitProgram gait = random_gait(g);
    if (std::holds_alternative<SquareWave>(gait)) gait = Breather::sine_squared(1.0, 0.7, 1.0);
    const double T = period(gait);
    const double a = cycle_displacement(law, with_period(gait, T)).net_displacement;
    const double b = cycle_displacement(law, with_period(gait, 2 * T)).net_displacement;
    if (!(std::abs(a - b) <= 1e-9)) out.fail(std::string(gait_kind(gait)) + " rate dependent on " + law_str(law));
  }
  // Mixed rheology: the yield terms scale with 1/ldot, so the stride speed matters.
  const FrictionLaw mixed(2.0, 1.0, 3.0, 1.0);
  for (const GaitProgram& gait : {GaitProgram{Breather::sine_squared(1.0, 1.0, 1.0)},
                                  GaitProgram{CompositeStride{0.5, 1.0, 2.0, 1.0}}}) {
    ++out.cases;
    const double a = cycle_displacement(mixed, with_period(gait, 1.0)).net_displacement;
    const double b = cycle_displacement(mixed, with_period(gait, 0.5)).net_displacement;
    if (!(std::abs(a - b) > 1e-3)) out.fail(std::string(gait_kind(gait)) + " unexpectedly rate independent");
  }
  return out;
}

/// At most one wave regime is ever admissible, and the classification agrees
/// with the admissibility table.
inline Outcome wave_exclusivity(int grid, std::uint64_t seed) {
  using namespace dircrawl;
  oracle::Gen g(seed);
  Outcome out;
  for (int i = 0; i < grid && out.ok; ++i, ++out.cases) {
    const auto law = g.any_law();
    const double eps = g.coin() ? g.uniform(0.05, 3.0) : -g.uniform(0.05, 0.95);
    const double c = g.log_uniform(0.1, 10);
    const double L = 1.0;
    const double delta = g.uniform(0.01, 0.99);
    const auto adm = wave_admissibility(law, eps, c, delta, L);
    if (adm.stick_slip_violation.empty() && adm.sliding_violation.empty()) {
      out.fail("both regimes admissible " + law_str(law));
    }
    const auto mode = oracle::wave_mode(oracle::from(law), eps, c, delta, L);
    const WaveRegime expect = mode == oracle::Mode::StickSlip ? WaveRegime::StickSlip
                              : mode == oracle::Mode::Sliding ? WaveRegime::Sliding
                                                              : WaveRegime::Infeasible;
    if (adm.regime != expect) {
      out.fail(std::string("classified ") + to_string(adm.regime) + " for " + law_str(law) + " eps=" + std::to_string(eps));
    }
  }
  return out;
}

}  // namespace props
