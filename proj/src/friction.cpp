#include "dircrawl/friction.hpp"

#include <cmath>
#include <string>

#include "dircrawl/error.hpp"

namespace dircrawl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UndefinedParameter: return "undefined-parameter";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::DegenerateSubstrate: return "degenerate-substrate";
    case ErrorKind::RegimeMismatch: return "regime-mismatch";
  }
  return "unknown";
}

namespace {

void check_parameter(const char* name, double value) {
  if (!std::isfinite(value) || value < 0.0) {
    fail(ErrorKind::InvalidArgument,
         std::string(name) + " must be finite and >= 0, got " + std::to_string(value));
  }
}

}  // namespace

FrictionLaw::FrictionLaw(double tau_minus, double tau_plus, double mu_minus, double mu_plus)
    : tau_minus_(tau_minus), tau_plus_(tau_plus), mu_minus_(mu_minus), mu_plus_(mu_plus) {
  check_parameter("tau_minus", tau_minus);
  check_parameter("tau_plus", tau_plus);
  check_parameter("mu_minus", mu_minus);
  check_parameter("mu_plus", mu_plus);
  if (tau_minus == 0.0 && tau_plus == 0.0 && mu_minus == 0.0 && mu_plus == 0.0) {
    fail(ErrorKind::InvalidArgument, "friction law with all parameters zero exerts no force");
  }
}

ForceValue evaluate(const FrictionLaw& law, double v) {
  if (v < 0.0) return ForceValue::point(law.tau_minus() - law.mu_minus() * v);
  if (v > 0.0) return ForceValue::point(-law.tau_plus() - law.mu_plus() * v);
  return ForceValue::interval(-law.tau_plus(), law.tau_minus());
}

FrictionLaw scale(const FrictionLaw& law, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    fail(ErrorKind::InvalidArgument, "scale factor must be positive, got " + std::to_string(k));
  }
  return {k * law.tau_minus(), k * law.tau_plus(), k * law.mu_minus(), k * law.mu_plus()};
}

bool is_directional(const FrictionLaw& law) {
  return law.tau_minus() != law.tau_plus() || law.mu_minus() != law.mu_plus();
}

std::pair<FrictionLaw, bool> normalize_orientation(const FrictionLaw& law) {
  const bool flip = law.mu_minus() != law.mu_plus() ? law.mu_minus() < law.mu_plus()
                                                    : law.tau_minus() < law.tau_plus();
  if (!flip) return {law, false};
  return {FrictionLaw(law.tau_plus(), law.tau_minus(), law.mu_plus(), law.mu_minus()), true};
}

DirectionalPair directional_pair(const FrictionLaw& law, bool elongating) {
  // Elongation: the part left of the zero-velocity point moves backwards.
  if (elongating) {
    return {law.tau_minus(), law.mu_minus(), -law.tau_plus(), law.mu_plus()};
  }
  return {-law.tau_plus(), law.mu_plus(), law.tau_minus(), law.mu_minus()};
}

double alpha(const FrictionLaw& law) {
  const double sum = law.tau_minus() + law.tau_plus();
  if (sum == 0.0) fail(ErrorKind::UndefinedParameter, "alpha is undefined when tau_minus + tau_plus = 0");
  return law.tau_minus() / sum;
}

double beta(const FrictionLaw& law) {
  if (law.mu_plus() == 0.0) fail(ErrorKind::UndefinedParameter, "beta is undefined when mu_plus = 0");
  return std::sqrt(law.mu_minus() / law.mu_plus());
}

}  // namespace dircrawl
