#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dircrawl/analytic.hpp"
#include "dircrawl/balance.hpp"
#include "dircrawl/body.hpp"
#include "dircrawl/friction.hpp"

namespace dircrawl {

/// Sampled motion. x1 is integrated from the quasi-static velocity with
/// two-point Gauss-Legendre on a grid that always contains the gait's stage
/// boundaries. regime[i] and x1dot[i] are taken at the midpoint of the step
/// from t[i] to t[i+1].
struct Trajectory {
  std::string gait;
  double period = 0.0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> l;
  std::vector<double> x1dot;
  std::vector<Regime> regime;
  /// Stage index (into stage_names(gait)) of every step.
  std::vector<std::size_t> stage;
};

/// dt <= 0 selects period / 2000.
Trajectory simulate(const FrictionLaw& law, const GaitProgram& gait, int n_periods = 1,
                    double dt = 0.0, double x1_start = 0.0);

struct StageContribution {
  std::string name;
  double numeric = 0.0;
  std::optional<double> analytic;
  /// Regimes met by the force balance during the stage, in order of first use.
  std::vector<Regime> regimes;
};

struct AnalyticCycle {
  double total = 0.0;
  std::vector<double> stages;  // empty when only the total is known
  std::string formula;
};

/// Closed-form one-period displacement when one exists for (law, gait).
std::optional<AnalyticCycle> analytic_cycle(const FrictionLaw& law, const GaitProgram& gait);

struct CycleReport {
  double net_displacement = 0.0;
  std::vector<StageContribution> stages;
  std::optional<double> analytic_value;
  std::string analytic_formula;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  std::optional<WaveAdmissibility> admissibility;
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<std::string> notes;
};

CycleReport cycle_displacement(const FrictionLaw& law, const GaitProgram& gait, double dt = 0.0);

struct VerifyCheck {
  std::string name;
  double numeric = 0.0;
  double expected = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  bool pass = false;
  std::vector<VerifyCheck> checks;
  CycleReport cycle;
};

/// Passes when |numeric - analytic| <= tol * max(1, |analytic|); sliding
/// waves additionally check stage c - stage a = epsilon * delta.
VerifyReport verify(const FrictionLaw& law, const GaitProgram& gait, double dt, double tol);

struct SweepAxis {
  std::string field;
  std::vector<double> values;
};

struct SweepSpec {
  FrictionLaw law;
  GaitProgram gait;
  double dt = 0.0;
  std::vector<SweepAxis> axes;
};

struct SweepRow {
  std::size_t index = 0;
  std::vector<double> values;
  std::optional<CycleReport> report;
  std::string error;
};

/// Cartesian product of the axes (last axis fastest). Rows are evaluated in
/// parallel and returned in grid order; row failures are recorded in the row.
/// workers == 0 reads DIRCRAWL_WORKERS, then falls back to the hardware count.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned workers = 0);

/// Sets a named law or gait parameter (tau_minus, alpha, beta, delta, epsilon, ...).
void apply_parameter(FrictionLaw& law, GaitProgram& gait, const std::string& field, double value);

struct CurvePoint {
  double parameter;
  double epsilon;
  double value;
};

struct CurveTable {
  std::string parameter_name;
  std::vector<CurvePoint> points;
};

std::vector<double> default_figure6_epsilons();
std::vector<double> default_figure7_epsilons();

/// Largest dry stick-slip displacement over L, per alpha and epsilon.
CurveTable figure6_data(const std::vector<double>& alphas, const std::vector<double>& epsilons,
                        double L = 1.0);

/// Newtonian sliding displacement over L, per beta^2 and epsilon.
CurveTable figure7_data(const std::vector<double>& beta_squared, const std::vector<double>& epsilons,
                        double delta_over_L = 0.25);

}  // namespace dircrawl
