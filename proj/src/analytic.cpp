#include "dircrawl/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "dircrawl/error.hpp"

namespace dircrawl {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::InvalidArgument, what); }

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1.0});
}

// Adaptive Simpson with Richardson correction.
double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Substrate seen by an extension wave. Contraction waves reuse the extension
// formulas on the mirrored substrate (tau-, tau+, mu-, mu+) -> (-tau+, -tau-, mu+, mu-).
struct WaveSubstrate {
  double tau_minus;
  double tau_plus;
  double mu_minus;
  double mu_plus;
};

WaveSubstrate wave_substrate(const FrictionLaw& law, double epsilon) {
  if (epsilon > 0.0) return {law.tau_minus(), law.tau_plus(), law.mu_minus(), law.mu_plus()};
  return {-law.tau_plus(), -law.tau_minus(), law.mu_plus(), law.mu_minus()};
}

void check_wave(double epsilon, double c, double delta, double L) {
  if (!(L > 0.0)) invalid("wave: L must be positive");
  if (!(delta > 0.0 && delta < L)) invalid("wave: delta must lie in (0, L)");
  if (!(epsilon > -1.0) || epsilon == 0.0 || !std::isfinite(epsilon)) {
    invalid("wave: epsilon must satisfy epsilon > -1 and epsilon != 0");
  }
  if (!(c > 0.0) || !std::isfinite(c)) invalid("wave: c must be positive");
}

void check_stride(double lambda, double delta, double h) {
  if (!(lambda > 0.0)) invalid("stride: lambda must be positive");
  if (!(delta > 0.0)) invalid("stride: delta must be positive");
  if (!(h > 1.0)) invalid("stride: h must exceed 1");
}

// (z - log(1 + z)) / z^2
double log_remainder(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z * (-1.0 / 3.0 + z * (0.25 + z * (-0.2 + z / 6.0)));
  return (z - std::log1p(z)) / (z * z);
}

}  // namespace

const char* to_string(WaveRegime regime) {
  switch (regime) {
    case WaveRegime::StickSlip: return "stick_slip";
    case WaveRegime::Sliding: return "sliding";
    case WaveRegime::Infeasible: return "infeasible";
  }
  return "unknown";
}

BreatherRoots breather_roots(const FrictionLaw& law, double ldot) {
  if (ldot == 0.0 || !std::isfinite(ldot)) {
    invalid("breather velocity needs a non-zero rate of length change");
  }
  const auto [tau1, mu1, tau2, mu2] = directional_pair(law, ldot > 0.0);
  const double k = (tau1 - tau2) / ldot;  // >= 0 in both orientations
  const double m = mu2 + k;
  BreatherRoots r;
  r.discriminant = std::max(0.0, mu1 * mu2 + k * k + 2.0 / ldot * (mu2 * tau1 - mu1 * tau2));
  const double numerator = 2.0 * tau2 / ldot - mu2;
  if (nearly_equal(mu1, mu2, 1e-12)) {
    const double mu = 0.5 * (mu1 + mu2);
    r.quadratic = false;
    r.c_minus = -0.5 * (1.0 + (tau1 + tau2) / (tau2 - tau1 - mu * ldot));
    r.c_plus = std::numeric_limits<double>::quiet_NaN();
  } else {
    // (m - sqrt(D)) / (mu1 - mu2), rationalised; m + sqrt(D) > 0 unless the
    // side ahead of the zero-velocity point is frictionless.
    const double root = std::sqrt(r.discriminant);
    r.quadratic = true;
    r.c_minus = numerator == 0.0 ? 0.0 : numerator / (m + root);
    r.c_plus = (m + root) / (mu1 - mu2);
  }
  r.admissible = r.c_minus > -1.0 && r.c_minus < 0.0;
  return r;
}

double breather_velocity(const FrictionLaw& law, double ldot) {
  return breather_roots(law, ldot).c_minus * ldot;
}

double breather_cycle_displacement(const FrictionLaw& law, const LengthProfile& profile) {
  const double T = profile.period();
  if (!(T > 0.0)) invalid("profile period must be positive");
  if (profile.closure_gap() > 1e-12 * std::max(1.0, std::abs(profile.length(0.0)))) {
    invalid("length profile is not periodic: l(T) != l(0)");
  }
  if (!is_directional(law)) return 0.0;

  std::vector<double> t{0.0};
  for (double c : profile.corners()) {
    if (c > 0.0 && c < T) t.push_back(c);
  }
  t.push_back(T);

  if (law.is_dry() || law.is_newtonian()) {
    // x1dot is proportional to ldot with a coefficient that only depends on
    // the sign of ldot, so each monotone stage contributes C * (change in l).
    const double c_ext = breather_velocity(law, 1.0);
    const double c_con = -breather_velocity(law, -1.0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double dl = profile.length(t[i + 1]) - profile.length(t[i]);
      total += (dl > 0.0 ? c_ext : c_con) * dl;
    }
    return total;
  }

  const auto velocity = [&](double time) {
    const double ldot = profile.rate(time);
    return ldot == 0.0 ? 0.0 : breather_velocity(law, ldot);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    // Stay off the corner itself so every sample sees the stage's own rate.
    const double a = t[i];
    const double b = std::nextafter(t[i + 1], a);
    total += adaptive_simpson(velocity, a, b, 1e-10 / static_cast<double>(t.size()));
  }
  return total;
}

double constant_length_velocity(const FrictionLaw& law, double L, double l1, double l1dot) {
  if (!(l1 > 0.0 && l1 < L)) invalid("constant-length crawler needs 0 < l1 < L");
  return breather_velocity(law, l1dot);
}

double dry_reversal_bound(double lambda, double delta, double h) {
  check_stride(lambda, delta, h);
  return 1.0 / (4.0 * lambda / delta + (3.0 * h - 1.0) / (h - 1.0));
}

double newtonian_reversal_bound(double lambda, double delta, double h) {
  check_stride(lambda, delta, h);
  return 1.0 / (2.0 * lambda / delta + h / (h - 1.0));
}

StrideDisplacement composite_stride_displacement(const FrictionLaw& law, double lambda, double delta,
                                                 double h) {
  check_stride(lambda, delta, h);
  StrideDisplacement out;
  const double span = 2.0 * lambda + delta;
  if (law.is_dry()) {
    const double a = alpha(law);
    out.edges = {a * delta, -(1.0 - a) * (h - 1.0) * span, -(1.0 - a) * h * delta,
                 -a * (1.0 - h) * span};
    out.total = a * (4.0 * lambda * (h - 1.0) + delta * (3.0 * h - 1.0)) - 2.0 * lambda * (h - 1.0) -
                delta * (2.0 * h - 1.0);
  } else if (law.is_newtonian()) {
    const double b = beta(law);
    const double ext = 1.0 / (b + 1.0);
    const double con = b / (b + 1.0);
    out.edges = {con * delta, -ext * (h - 1.0) * span, -ext * h * delta, -con * (1.0 - h) * span};
    out.total = con * (2.0 * lambda * (h - 1.0) + delta * h) -
                ext * (2.0 * lambda * (h - 1.0) + delta * (2.0 * h - 1.0));
  } else {
    fail(ErrorKind::Unsupported,
         "closed-form stride displacement needs a pure dry or pure Newtonian substrate; "
         "use simulate for general Bingham laws");
  }
  return out;
}

bool negative_displacement_feasible(const FrictionLaw& law, double lambda, double delta, double h) {
  if (law.is_dry()) return 2.0 * alpha(law) - 1.0 < dry_reversal_bound(lambda, delta, h);
  if (law.is_newtonian()) return beta(law) - 1.0 < newtonian_reversal_bound(lambda, delta, h);
  fail(ErrorKind::Unsupported,
       "reversal criterion needs a pure dry or pure Newtonian substrate; use simulate");
}

WaveAdmissibility wave_admissibility(const FrictionLaw& law, double epsilon, double c, double delta,
                                     double L) {
  check_wave(epsilon, c, delta, L);
  const auto w = wave_substrate(law, epsilon);
  const bool extension = epsilon > 0.0;
  const std::string ahead_tau = extension ? "tau_plus" : "tau_minus";
  const std::string ahead_mu = extension ? "mu_plus" : "mu_minus";
  const double ec = epsilon * c;

  WaveAdmissibility out;
  // In mirrored form tau_plus <= 0 for contractions; the ratios below are the
  // extension-wave bounds and stay positive in both orientations.
  if (w.tau_plus != 0.0) {
    out.delta_max_stick_slip =
        w.tau_plus * L / ((w.tau_minus + w.mu_minus * ec) * (1.0 + epsilon) + w.tau_plus);
  }
  if (w.mu_plus != 0.0) {
    out.delta_max_sliding = w.mu_plus * ec * L / (w.mu_plus * ec + w.tau_minus * (1.0 + epsilon));
  }

  if (w.tau_plus == 0.0) {
    out.stick_slip_violation = ahead_tau + "=0";
  } else if (!(delta <= out.delta_max_stick_slip)) {
    out.stick_slip_violation = "delta > delta_max for stick-slip";
  }
  if (w.tau_plus != 0.0) {
    out.sliding_violation = ahead_tau + "!=0";
  } else if (w.mu_plus == 0.0) {
    out.sliding_violation = ahead_mu + "=0";
  } else if (!(delta < out.delta_max_sliding)) {
    out.sliding_violation = "delta >= delta_max for sliding";
  }

  out.delta_max = w.tau_plus != 0.0 ? out.delta_max_stick_slip : out.delta_max_sliding;
  if (out.stick_slip_violation.empty()) {
    out.regime = WaveRegime::StickSlip;
  } else if (out.sliding_violation.empty()) {
    out.regime = WaveRegime::Sliding;
  } else {
    out.regime = WaveRegime::Infeasible;
    out.violated_condition = w.tau_plus != 0.0 ? out.stick_slip_violation : out.sliding_violation;
  }
  return out;
}

double stickslip_displacement(double epsilon, double delta) { return -epsilon * delta; }

double stickslip_max_displacement_dry(double alpha_value, double epsilon, double L) {
  if (!(alpha_value > 0.0 && alpha_value < 1.0)) invalid("alpha must lie in (0, 1)");
  if (!(epsilon > -1.0) || !std::isfinite(epsilon)) invalid("epsilon must exceed -1");
  if (epsilon >= 0.0) return -epsilon * (1.0 - alpha_value) * L / (1.0 + epsilon * alpha_value);
  return -epsilon * alpha_value * L / (1.0 + epsilon * (1.0 - alpha_value));
}

namespace {

void require_sliding(const FrictionLaw& law, double epsilon, double c, double delta, double L) {
  const auto adm = wave_admissibility(law, epsilon, c, delta, L);
  if (adm.regime != WaveRegime::Sliding) {
    fail(ErrorKind::RegimeMismatch,
         "sliding formulas do not apply: " + adm.sliding_violation +
             " (classified as " + to_string(adm.regime) + ")");
  }
}

}  // namespace

double sliding_stage_velocity(const FrictionLaw& law, double epsilon, double c, double delta, double L,
                              double t) {
  require_sliding(law, epsilon, c, delta, L);
  const double T = (L + delta) / c;
  if (!(t >= 0.0 && t < T)) invalid("time must lie in [0, (L + delta) / c)");
  const auto w = wave_substrate(law, epsilon);
  const double e1 = 1.0 + epsilon;
  const double ec = epsilon * c;
  const double ct = c * t;
  if (ct < delta) {
    return (w.tau_minus * e1 * ct - (w.tau_plus + w.mu_plus * ec) * (L - ct)) /
           (w.mu_minus * e1 * ct + w.mu_plus * (L - ct));
  }
  if (ct < L) {
    return ((w.tau_minus + w.mu_minus * ec) * e1 * delta - w.tau_plus * (L - delta)) /
           (w.mu_minus * e1 * delta + w.mu_plus * (L - delta));
  }
  const double inside = L - ct + delta;
  return ((w.tau_minus + w.mu_minus * ec) * e1 * inside - w.tau_plus * (ct - delta)) /
         (w.mu_minus * e1 * inside + w.mu_plus * (ct - delta));
}

SlidingDisplacement sliding_cycle_displacement(const FrictionLaw& law, double epsilon, double c,
                                               double delta, double L) {
  require_sliding(law, epsilon, c, delta, L);
  const auto w = wave_substrate(law, epsilon);
  const double e1 = 1.0 + epsilon;
  const double ec = epsilon * c;
  const double drive = w.tau_minus + w.mu_minus * ec;
  const double D = e1 * w.mu_minus - w.mu_plus;

  SlidingDisplacement out;
  out.stage_b = delta * (L - delta) * drive * e1 / (delta * e1 * w.mu_minus * c + (L - delta) * w.mu_plus * c);
  if (std::abs(D) <= 1e-10 * std::max({std::abs(e1 * w.mu_minus), std::abs(w.mu_plus), 1.0})) {
    out.degenerate_branch = true;
    const double quad = delta * delta * epsilon / (2.0 * L) +
                        delta * delta * e1 * w.tau_minus / (2.0 * L * w.mu_plus * c);
    out.stage_a = -epsilon * delta + quad;
    out.stage_c = quad;
  } else {
    // Stage integrals: -eps delta + K delta^2 phi(z) / (L mu+)^2 and
    // K delta^2 phi(z) / (L mu+)^2, with phi(z) = (z - ln(1 + z)) / z^2.
    const double K = L * e1 * drive * w.mu_plus / c;
    const double z = delta * D / (L * w.mu_plus);
    const double tail = K * delta * delta * log_remainder(z) / (L * L * w.mu_plus * w.mu_plus);
    out.stage_a = -epsilon * delta + tail;
    out.stage_c = tail;
  }
  out.total = out.stage_a + out.stage_b + out.stage_c;
  return out;
}

double newtonian_sliding_displacement(double beta_value, double epsilon, double delta, double L) {
  if (!(beta_value > 0.0) || !std::isfinite(beta_value)) invalid("beta must be positive");
  return sliding_cycle_displacement(FrictionLaw::newtonian(beta_value * beta_value, 1.0), epsilon, 1.0,
                                    delta, L)
      .total;
}

}  // namespace dircrawl
