#include "dircrawl/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "dircrawl/error.hpp"

namespace dircrawl {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::InvalidArgument, what); }

struct Step {
  double t0;
  double t1;
  std::size_t stage;
};

std::vector<Step> period_grid(const GaitProgram& gait, double dt) {
  const auto bounds = stage_times(gait);
  std::vector<Step> steps;
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const double a = bounds[s];
    const double b = bounds[s + 1];
    if (!(b > a)) continue;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / dt - 1e-9)));
    for (std::size_t i = 0; i < n; ++i) {
      const double t0 = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
      const double t1 = i + 1 == n ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(n);
      steps.push_back({t0, t1, s});
    }
  }
  return steps;
}

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

Trajectory simulate(const FrictionLaw& law, const GaitProgram& gait, int n_periods, double dt,
                    double x1_start) {
  validate(gait);
  if (n_periods < 1) invalid("number of periods must be at least 1");
  const double T = period(gait);
  if (dt <= 0.0) dt = T / 2000.0;
  if (!std::isfinite(dt)) invalid("dt must be finite");

  const auto steps = period_grid(gait, dt);
  // x1dot depends on t only through the gait phase, so one period of
  // velocities serves every period.
  std::vector<double> velocity(steps.size());
  std::vector<double> increment(steps.size());
  std::vector<Regime> regime(steps.size());
  const double g = 0.5 / std::sqrt(3.0);
  auto solve_at = [&](double t) {
    try {
      return solve_velocity(law, shape_at(gait, t), rate_at(gait, t));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (at t=" + format_time(t) + ")");
    }
  };
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double h = steps[i].t1 - steps[i].t0;
    const double tm = 0.5 * (steps[i].t0 + steps[i].t1);
    const auto mid = solve_at(tm);
    const auto lo = solve_at(tm - g * h);
    const auto hi = solve_at(tm + g * h);
    velocity[i] = mid.x1dot;
    regime[i] = mid.regime;
    increment[i] = 0.5 * h * (lo.x1dot + hi.x1dot);
  }

  Trajectory traj;
  traj.gait = gait_kind(gait);
  traj.period = T;
  traj.dt = dt;
  const std::size_t total = steps.size() * static_cast<std::size_t>(n_periods);
  traj.t.reserve(total + 1);
  traj.x1.reserve(total + 1);
  traj.x1dot.reserve(total);

  double x1 = x1_start;
  auto push_sample = [&](double t) {
    const double l = length(shape_at(gait, t));
    traj.t.push_back(t);
    traj.x1.push_back(x1);
    traj.l.push_back(l);
    traj.x2.push_back(x1 + l);
  };
  push_sample(0.0);
  for (int p = 0; p < n_periods; ++p) {
    const double offset = T * p;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      x1 += increment[i];
      traj.x1dot.push_back(velocity[i]);
      traj.regime.push_back(regime[i]);
      traj.stage.push_back(steps[i].stage);
      push_sample(offset + steps[i].t1);
    }
  }
  return traj;
}

std::optional<AnalyticCycle> analytic_cycle(const FrictionLaw& law, const GaitProgram& gait) {
  validate(gait);
  struct {
    const FrictionLaw& law;
    std::optional<AnalyticCycle> operator()(const Breather& b) const {
      return AnalyticCycle{breather_cycle_displacement(law, b.profile), {}, "breather"};
    }
    std::optional<AnalyticCycle> operator()(const ConstantLength& g) const {
      return AnalyticCycle{breather_cycle_displacement(law, g.l1), {}, "constant_length"};
    }
    std::optional<AnalyticCycle> operator()(const TwoSegmentPath&) const { return std::nullopt; }
    std::optional<AnalyticCycle> operator()(const CompositeStride& s) const {
      if (!(law.is_dry() || (law.is_newtonian() && law.mu_plus() > 0.0))) return std::nullopt;
      const auto d = composite_stride_displacement(law, s.lambda, s.delta, s.h);
      return AnalyticCycle{d.total, {d.edges.begin(), d.edges.end()},
                           law.is_dry() ? "composite_stride_dry" : "composite_stride_newtonian"};
    }
    std::optional<AnalyticCycle> operator()(const SquareWave& w) const {
      const auto adm = wave_admissibility(law, w.epsilon, w.c, w.delta, w.L);
      if (adm.regime == WaveRegime::StickSlip) {
        const double d = stickslip_displacement(w.epsilon, w.delta);
        return AnalyticCycle{d, {d, 0.0, 0.0}, "stick_slip_wave"};
      }
      if (adm.regime == WaveRegime::Sliding) {
        const auto d = sliding_cycle_displacement(law, w.epsilon, w.c, w.delta, w.L);
        return AnalyticCycle{d.total, {d.stage_a, d.stage_b, d.stage_c},
                             d.degenerate_branch ? "sliding_wave_degenerate" : "sliding_wave"};
      }
      return std::nullopt;
    }
  } v{law};
  return std::visit(v, gait);
}

CycleReport cycle_displacement(const FrictionLaw& law, const GaitProgram& gait, double dt) {
  const auto traj = simulate(law, gait, 1, dt);
  const auto names = stage_names(gait);

  CycleReport report;
  report.net_displacement = traj.x1.back() - traj.x1.front();
  report.steps = traj.x1dot.size();
  report.dt = traj.dt;
  report.stages.resize(names.size());
  for (std::size_t s = 0; s < names.size(); ++s) report.stages[s].name = names[s];
  for (std::size_t i = 0; i < traj.x1dot.size(); ++i) {
    auto& stage = report.stages[traj.stage[i]];
    stage.numeric += traj.x1[i + 1] - traj.x1[i];
    if (std::find(stage.regimes.begin(), stage.regimes.end(), traj.regime[i]) == stage.regimes.end()) {
      stage.regimes.push_back(traj.regime[i]);
    }
  }

  if (const auto* w = std::get_if<SquareWave>(&gait)) {
    report.admissibility = wave_admissibility(law, w->epsilon, w->c, w->delta, w->L);
    const auto& adm = *report.admissibility;
    if (adm.regime == WaveRegime::Infeasible) {
      report.notes.push_back("closed-form admissibility: infeasible (" + adm.violated_condition +
                             "); displacement follows the force balance");
    } else if (adm.regime == WaveRegime::StickSlip) {
      // The undeformed part must stay at rest: x1dot = -eps c while entering, 0 afterwards.
      double worst = 0.0;
      for (std::size_t i = 0; i < traj.x1dot.size(); ++i) {
        const double expected = traj.stage[i] == 0 ? -w->epsilon * w->c : 0.0;
        worst = std::max(worst, std::abs(traj.x1dot[i] - expected));
      }
      if (worst > 1e-9 * std::abs(w->epsilon * w->c)) {
        report.notes.push_back("force balance departs from the stick-slip ansatz (max |x1dot error| = " +
                               format_time(worst) + ")");
      }
    } else {
      for (std::size_t i = 0; i < traj.x1dot.size(); ++i) {
        if (traj.regime[i] != Regime::Sliding) {
          report.notes.push_back("force balance reports sticking inside a predicted sliding cycle");
          break;
        }
      }
    }
  }

  if (const auto analytic = analytic_cycle(law, gait)) {
    report.analytic_value = analytic->total;
    report.analytic_formula = analytic->formula;
    report.abs_residual = std::abs(report.net_displacement - analytic->total);
    report.rel_residual = report.abs_residual / std::max(1e-300, std::abs(analytic->total));
    if (analytic->stages.size() == report.stages.size()) {
      for (std::size_t s = 0; s < report.stages.size(); ++s) report.stages[s].analytic = analytic->stages[s];
    }
  } else {
    report.abs_residual = std::nan("");
    report.rel_residual = std::nan("");
  }
  return report;
}

VerifyReport verify(const FrictionLaw& law, const GaitProgram& gait, double dt, double tol) {
  if (!(tol > 0.0)) invalid("verification tolerance must be positive");
  if (!analytic_cycle(law, gait)) {
    fail(ErrorKind::Unsupported, std::string("no closed form available for this substrate and ") +
                                     gait_kind(gait) + " gait");
  }
  VerifyReport out;
  out.cycle = cycle_displacement(law, gait, dt);
  const double expected = *out.cycle.analytic_value;
  VerifyCheck main{"cycle_displacement", out.cycle.net_displacement, expected,
                   std::abs(out.cycle.net_displacement - expected), tol * std::max(1.0, std::abs(expected)),
                   false};
  main.pass = main.residual <= main.tolerance;
  out.checks.push_back(main);

  if (const auto* w = std::get_if<SquareWave>(&gait);
      w && out.cycle.admissibility && out.cycle.admissibility->regime == WaveRegime::Sliding) {
    const double identity = w->epsilon * w->delta;
    const double diff = out.cycle.stages[2].numeric - out.cycle.stages[0].numeric;
    VerifyCheck stage{"stage_identity", diff, identity, std::abs(diff - identity),
                      1e-10 * std::max(1.0, std::abs(identity)), false};
    stage.pass = stage.residual <= stage.tolerance;
    out.checks.push_back(stage);
  }
  out.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const auto& c) { return c.pass; });
  return out;
}

void apply_parameter(FrictionLaw& law, GaitProgram& gait, const std::string& field, double value) {
  const double tm = law.tau_minus();
  const double tp = law.tau_plus();
  const double mm = law.mu_minus();
  const double mp = law.mu_plus();
  if (field == "tau_minus") { law = FrictionLaw(value, tp, mm, mp); return; }
  if (field == "tau_plus") { law = FrictionLaw(tm, value, mm, mp); return; }
  if (field == "mu_minus") { law = FrictionLaw(tm, tp, value, mp); return; }
  if (field == "mu_plus") { law = FrictionLaw(tm, tp, mm, value); return; }
  if (field == "alpha") {
    if (!(value > 0.0 && value < 1.0)) invalid("alpha must lie in (0, 1)");
    const double sum = tm + tp > 0.0 ? tm + tp : 1.0;
    law = FrictionLaw(value * sum, (1.0 - value) * sum, mm, mp);
    return;
  }
  if (field == "beta") {
    if (!(value > 0.0)) invalid("beta must be positive");
    const double base = mp > 0.0 ? mp : 1.0;
    law = FrictionLaw(tm, tp, value * value * base, base);
    return;
  }

  auto rebuild = [&](const LengthProfile& p, double base, double delta, double T) {
    switch (p.kind()) {
      case LengthProfile::Kind::SineSquared: return LengthProfile::sine_squared(base, delta, T);
      case LengthProfile::Kind::Triangle: return LengthProfile::triangle(base, delta, T, p.rise_fraction());
      case LengthProfile::Kind::Custom: break;
    }
    invalid("custom length profiles cannot be swept");
  };
  bool applied = false;
  std::visit(
      [&](auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, Breather>) {
          const auto& p = g.profile;
          if (field == "L") { g.profile = rebuild(p, value + (p.base() - g.L), p.delta(), p.period()); g.L = value; applied = true; }
          if (field == "delta") { g.profile = rebuild(p, p.base(), value, p.period()); applied = true; }
          if (field == "T") { g.profile = rebuild(p, p.base(), p.delta(), value); applied = true; }
          if (field == "rise_fraction") { g.profile = LengthProfile::triangle(p.base(), p.delta(), p.period(), value); applied = true; }
        } else if constexpr (std::is_same_v<G, ConstantLength>) {
          const auto& p = g.l1;
          if (field == "L") { g.L = value; applied = true; }
          if (field == "Xstar") { g.l1 = rebuild(p, value, p.delta(), p.period()); g.Xstar = value; applied = true; }
          if (field == "delta") { g.l1 = rebuild(p, p.base(), value, p.period()); applied = true; }
          if (field == "T") { g.l1 = rebuild(p, p.base(), p.delta(), value); applied = true; }
        } else if constexpr (std::is_same_v<G, CompositeStride>) {
          if (field == "lambda") { g.lambda = value; applied = true; }
          if (field == "delta") { g.delta = value; applied = true; }
          if (field == "h") { g.h = value; applied = true; }
          if (field == "T") { g.T = value; applied = true; }
        } else if constexpr (std::is_same_v<G, TwoSegmentPath>) {
          if (field == "T") { g.T = value; applied = true; }
        } else if constexpr (std::is_same_v<G, SquareWave>) {
          if (field == "L") { g.L = value; applied = true; }
          if (field == "delta") { g.delta = value; applied = true; }
          if (field == "epsilon") { g.epsilon = value; applied = true; }
          if (field == "c") { g.c = value; applied = true; }
        }
      },
      gait);
  if (!applied) invalid("unknown sweep field '" + field + "' for " + gait_kind(gait) + " gait");
  validate(gait);
}

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned workers) {
  std::size_t count = spec.axes.empty() ? 0 : 1;
  for (const auto& axis : spec.axes) count *= axis.values.size();
  std::vector<SweepRow> rows(count);
  if (count == 0) return rows;

  for (std::size_t index = 0; index < count; ++index) {
    rows[index].index = index;
    std::size_t rest = index;
    rows[index].values.resize(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& values = spec.axes[a].values;
      rows[index].values[a] = values[rest % values.size()];
      rest /= values.size();
    }
  }

  if (workers == 0) {
    if (const char* env = std::getenv("DIRCRAWL_WORKERS")) workers = static_cast<unsigned>(std::atoi(env));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      auto& row = rows[i];
      try {
        FrictionLaw law = spec.law;
        GaitProgram gait = spec.gait;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
          apply_parameter(law, gait, spec.axes[a].field, row.values[a]);
        }
        row.report = cycle_displacement(law, gait, spec.dt);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

namespace {

std::vector<double> arange(double start, double stop, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::llround((stop - start) / step));
  for (int i = 0; i <= n; ++i) {
    double v = start + step * i;
    if (std::abs(v) < 1e-12) v = 0.0;
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> default_figure6_epsilons() { return arange(-0.95, 1.0, 0.05); }
std::vector<double> default_figure7_epsilons() { return arange(-0.95, 0.95, 0.05); }

CurveTable figure6_data(const std::vector<double>& alphas, const std::vector<double>& epsilons, double L) {
  if (!(L > 0.0)) invalid("L must be positive");
  CurveTable table{"alpha", {}};
  for (double a : alphas) {
    for (double e : epsilons) {
      if (!(e > -1.0)) invalid("figure 6 epsilon values must exceed -1");
      table.points.push_back({a, e, stickslip_max_displacement_dry(a, e, L) / L});
    }
  }
  return table;
}

CurveTable figure7_data(const std::vector<double>& beta_squared, const std::vector<double>& epsilons,
                        double delta_over_L) {
  if (!(delta_over_L > 0.0 && delta_over_L < 1.0)) invalid("delta / L must lie in (0, 1)");
  CurveTable table{"beta_squared", {}};
  for (double b2 : beta_squared) {
    if (!(b2 > 0.0)) invalid("beta^2 must be positive");
    for (double e : epsilons) {
      if (!(e > -1.0 && e < 1.0)) invalid("figure 7 epsilon values must lie in (-1, 1)");
      const double v = e == 0.0 ? 0.0 : newtonian_sliding_displacement(std::sqrt(b2), e, delta_over_L, 1.0);
      table.points.push_back({b2, e, v});
    }
  }
  return table;
}

}  // namespace dircrawl
