#pragma once

// Reference values computed without the library's solvers: closed forms
// transcribed term by term in long double, and a bisection solver on an
// independently derived force integral.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <cstdint>
#include <random>
#include <string>

#include "dircrawl/body.hpp"
#include "dircrawl/friction.hpp"

namespace oracle {

using real = long double;

struct Law {
  real tm, tp, mm, mp;
};

inline Law from(const dircrawl::FrictionLaw& f) {
  return {f.tau_minus(), f.tau_plus(), f.mu_minus(), f.mu_plus()};
}

// ---- one-segment crawler, orientation-normalized table ----

inline bool needs_flip(const Law& w) { return w.mm < w.mp || (w.mm == w.mp && w.tm < w.tp); }

inline real velocity_normalized(const Law& w, real ldot) {
  const real a = std::fabs(ldot);
  if (w.mm == w.mp) {
    const real mu = w.mm;
    const real k = (w.tm - w.tp) / (w.tm + w.tp + mu * a);
    return ldot > 0 ? (k - 1) * ldot / 2 : (k + 1) * a / 2;
  }
  const real sum = w.tm + w.tp;
  const real root = std::sqrt(w.mm * w.mp + sum * sum / (a * a) + 2 / a * (w.mm * w.tp + w.mp * w.tm));
  const real lead = ldot > 0 ? w.mp : w.mm;
  return (lead + sum / a - root) / (w.mm - w.mp) * a;
}

/// Left-end velocity of a breather. A law violating the orientation
/// convention is read in the mirrored axis, where the left end is the old
/// right end: x1dot = -(x1dot' + ldot).
inline real left_end_velocity(const Law& w, real ldot) {
  if (!needs_flip(w)) return velocity_normalized(w, ldot);
  const Law f{w.tp, w.tm, w.mp, w.mm};
  return -(velocity_normalized(f, ldot) + ldot);
}

struct Pair {
  real t1, m1, t2, m2;
};

inline Pair pair_of(const Law& w, real ldot) {
  if (ldot > 0) return {w.tm, w.mm, -w.tp, w.mp};
  return {-w.tp, w.mp, w.tm, w.mm};
}

inline real discriminant(const Law& w, real ldot) {
  const auto p = pair_of(w, ldot);
  return p.m1 * p.m2 + (p.t2 - p.t1) * (p.t2 - p.t1) / (ldot * ldot) + 2 / ldot * (p.m2 * p.t1 - p.m1 * p.t2);
}

/// Strict bracketing of the discriminant between the squared shifted viscosities.
inline bool discriminant_bracketed(const Law& w, real ldot) {
  const auto p = pair_of(w, ldot);
  if (p.m1 == p.m2) return true;
  const real d = discriminant(w, ldot);
  const real shift = (p.t1 - p.t2) / ldot;
  const real lo = std::min(p.m1, p.m2) + shift;
  const real hi = std::max(p.m1, p.m2) + shift;
  return lo * lo < d && d < hi * hi;
}

// ---- composite stride ----

inline real stride_dry(real a, real lam, real del, real h) {
  return a * (4 * lam * (h - 1) + del * (3 * h - 1)) - 2 * lam * (h - 1) - del * (2 * h - 1);
}

inline real stride_dry_edges(real a, real lam, real del, real h, int edge) {
  switch (edge) {
    case 0: return a * del;
    case 1: return -(1 - a) * (h - 1) * (2 * lam + del);
    case 2: return -(1 - a) * h * del;
    default: return -a * (1 - h) * (2 * lam + del);
  }
}

inline real stride_newtonian(real b, real lam, real del, real h) {
  return b / (b + 1) * (2 * lam * (h - 1) + del * h) - 1 / (b + 1) * (2 * lam * (h - 1) + del * (2 * h - 1));
}

inline real stride_newtonian_edges(real b, real lam, real del, real h, int edge) {
  switch (edge) {
    case 0: return b / (b + 1) * del;
    case 1: return -1 / (b + 1) * (h - 1) * (2 * lam + del);
    case 2: return -1 / (b + 1) * h * del;
    default: return -b / (b + 1) * (1 - h) * (2 * lam + del);
  }
}

inline real dry_bound(real lam, real del, real h) { return 1 / (4 * lam / del + (3 * h - 1) / (h - 1)); }
inline real newtonian_bound(real lam, real del, real h) { return 1 / (2 * lam / del + h / (h - 1)); }

// ---- square waves ----

/// Contraction waves reuse the extension formulas on the mirrored law.
inline Law wave_law(const Law& w, real eps) {
  if (eps > 0) return w;
  return {-w.tp, -w.tm, w.mp, w.mm};
}

inline real delta_max_plus(const Law& w, real eps, real c, real L) {
  return w.tp * L / ((w.tm + w.mm * eps * c) * (1 + eps) + w.tp);
}

inline real delta_max_minus(const Law& w, real eps, real c, real L) {
  return w.tm * L / ((w.tp - w.mp * eps * c) * (1 + eps) + w.tm);
}

enum class Mode { StickSlip, Sliding, Infeasible };

/// Wave regime straight from the admissibility conditions.
inline Mode wave_mode(const Law& w, real eps, real c, real delta, real L) {
  if (eps > 0) {
    if (w.tp != 0 && delta <= delta_max_plus(w, eps, c, L)) return Mode::StickSlip;
    if (w.tp == 0 && w.mp != 0 && delta < w.mp * eps * c / (w.mp * eps * c + w.tm * (1 + eps)) * L) {
      return Mode::Sliding;
    }
    return Mode::Infeasible;
  }
  if (w.tm != 0 && delta <= delta_max_minus(w, eps, c, L)) return Mode::StickSlip;
  if (w.tm == 0 && w.mm != 0 && delta < w.mm * eps * c / (w.mm * eps * c - w.tp * (1 + eps)) * L) {
    return Mode::Sliding;
  }
  return Mode::Infeasible;
}

inline real stickslip_max_dry(real a, real eps, real L) {
  if (eps > 0) return -eps * (1 - a) * L / (1 + eps * a);
  return -eps * a * L / (1 + eps * (1 - a));
}

/// Stage velocities of a sliding crawler; `w` already mirrored for contractions.
inline real sliding_velocity(const Law& w, real eps, real c, real delta, real L, real t) {
  const real e1 = 1 + eps;
  if (c * t < delta) {
    return (w.tm * e1 * c * t - (w.tp + w.mp * eps * c) * (L - c * t)) / (w.mm * e1 * c * t + w.mp * (L - c * t));
  }
  if (c * t < L) {
    return ((w.tm + w.mm * eps * c) * e1 * delta - w.tp * (L - delta)) / (w.mm * e1 * delta + w.mp * (L - delta));
  }
  const real in = L - c * t + delta;
  return ((w.tm + w.mm * eps * c) * e1 * in - w.tp * (c * t - delta)) / (w.mm * e1 * in + w.mp * (c * t - delta));
}

struct Sliding {
  real a, b, c, total;
};

inline Sliding sliding_closed_form(const Law& w, real eps, real c, real delta, real L) {
  const real e1 = 1 + eps;
  const real D = e1 * w.mm - w.mp;
  const real b = delta * (L - delta) * (w.tm + w.mm * eps * c) * e1 / (delta * e1 * w.mm * c + (L - delta) * w.mp * c);
  const real lg = std::log(L * w.mp / (delta * e1 * w.mm + (L - delta) * w.mp));
  const real K = L * e1 * (w.tm + w.mm * eps * c) * w.mp / (c * D * D);
  const real a = delta * (e1 * w.tm + w.mp * eps * c) / (c * D) + K * lg;
  const real cc = delta * e1 * (w.tm + w.mm * eps * c) / (c * D) + K * lg;
  const real total = delta * eps * (e1 * w.mm + w.mp) / D + 2 * delta * e1 * w.tm / (c * D) + b + 2 * K * lg;
  return {a, b, cc, total};
}

/// Branch (1 + eps) mu- == mu+.
inline Sliding sliding_closed_form_degenerate(const Law& w, real eps, real c, real delta, real L) {
  const real e1 = 1 + eps;
  const real b = delta * (L - delta) * (w.tm + w.mm * eps * c) * e1 / (delta * e1 * w.mm * c + (L - delta) * w.mp * c);
  const real a = -eps * delta + delta * delta * eps / (2 * L) + delta * delta * e1 * w.tm / (2 * L * w.mp * c);
  const real cc = delta * delta * eps / (2 * L) + delta * delta * e1 * w.tm / (2 * L * w.mp * c);
  const real total = -eps * delta + delta * delta * eps / L + delta * delta * e1 * w.tm / (L * w.mp * c) + b;
  return {a, b, cc, total};
}

inline real newtonian_sliding(real beta, real eps, real delta, real L) {
  if (eps < 0) beta = 1 / beta;
  const real b2 = beta * beta;
  const real e1 = 1 + eps;
  const real D = e1 * b2 - 1;
  return delta * eps * (e1 * b2 + 1) / D + delta * (L - delta) * e1 * eps * b2 / (delta * e1 * b2 + (L - delta)) +
         2 * L * e1 * eps * b2 / (D * D) * std::log(L / (delta * e1 * b2 + (L - delta)));
}

/// Gauss-Legendre (20 points, composite over `panels`) of f on [a, b].
template <class F>
real gauss(F&& f, real a, real b, int panels = 64) {
  static const real x[10] = {0.0765265211334973337546404L, 0.2277858511416450780804962L,
                             0.3737060887154195606725482L, 0.5108670019508270980043641L,
                             0.6360536807265150254528367L, 0.7463319064601507926143051L,
                             0.8391169718222188233945291L, 0.9122344282513259058677524L,
                             0.9639719272779137912676661L, 0.9931285991850949247861224L};
  static const real wt[10] = {0.1527533871307258506980843L, 0.1491729864726037467878287L,
                              0.1420961093183820513292983L, 0.1316886384491766268984945L,
                              0.1181945319615184173123774L, 0.1019301198172404350367501L,
                              0.0832767415767047487247581L, 0.0626720483341090635695065L,
                              0.0406014298003869413310400L, 0.0176140071391521183118620L};
  real sum = 0;
  const real h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const real m = a + h * (p + 0.5L);
    for (int i = 0; i < 10; ++i) sum += wt[i] * (f(m - 0.5L * h * x[i]) + f(m + 0.5L * h * x[i]));
  }
  return sum * h / 2;
}

inline Sliding sliding_quadrature(const Law& w, real eps, real c, real delta, real L) {
  auto v = [&](real t) { return sliding_velocity(w, eps, c, delta, L, t); };
  const real a = gauss(v, 0, delta / c);
  const real b = (L - delta) / c * v((L + delta) / (2 * c));
  const real cc = gauss(v, L / c, (L + delta) / c);
  return {a, b, cc, a + b + cc};
}

// ---- force balance by bisection ----

/// Antiderivative of the friction law along v, zero at v = 0.
inline real primitive(const Law& w, real v) {
  if (v < 0) return w.tm * v - w.mm * v * v / 2;
  return -w.tp * v - w.mp * v * v / 2;
}

inline real law_at(const Law& w, real v) { return v < 0 ? w.tm - w.mm * v : -w.tp - w.mp * v; }

struct Range {
  real lo, hi;
};

/// Integral of the force density over the body. On each piece v is affine
/// in arc-length, so the integral is |piece| times the mean of f over [va, vb].
inline Range force(const Law& w, const dircrawl::PiecewiseAffineShape& shape, const dircrawl::ShapeRate& rate,
                   real x1dot) {
  Range r{0, 0};
  const auto& n = shape.nodes();
  for (std::size_t i = 0; i + 1 < n.size(); ++i) {
    const real len = static_cast<real>(n[i + 1].s) - n[i].s;
    const real va = x1dot + rate.pieces[i].left;
    const real vb = x1dot + rate.pieces[i].right;
    if (va == 0 && vb == 0) {
      r.lo -= w.tp * len;
      r.hi += w.tm * len;
    } else if (va == vb) {
      r.lo += len * law_at(w, va);
      r.hi += len * law_at(w, va);
    } else {
      const real f = len * (primitive(w, vb) - primitive(w, va)) / (vb - va);
      r.lo += f;
      r.hi += f;
    }
  }
  return r;
}

/// Element of {x : 0 in F(x)} closest to zero, by bisection on the sign of F.
inline real bisect_velocity(const Law& w, const dircrawl::PiecewiseAffineShape& shape,
                            const dircrawl::ShapeRate& rate) {
  auto sign = [&](real x) {
    const auto f = force(w, shape, rate, x);
    if (f.lo > 0) return 1;
    if (f.hi < 0) return -1;
    return 0;
  };
  real lo = -1, hi = 1;
  while (sign(lo) <= 0 && lo > -1e12L) lo *= 2;
  while (sign(hi) >= 0 && hi < 1e12L) hi *= 2;
  // leftmost non-positive point and rightmost non-negative point
  auto edge = [&](real a, real b, bool left) {
    for (int k = 0; k < 200; ++k) {
      const real m = (a + b) / 2;
      const int s = sign(m);
      if (left ? s > 0 : s >= 0) a = m; else b = m;
    }
    return (a + b) / 2;
  };
  const real s_lo = edge(lo, hi, true);
  const real s_hi = edge(lo, hi, false);
  if (s_lo <= 0 && 0 <= s_hi) return 0;
  return std::fabs(s_lo) < std::fabs(s_hi) ? s_lo : s_hi;
}

// ---- random generators ----

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  /// Bingham law with all four coefficients positive and spread over decades.
  dircrawl::FrictionLaw bingham() {
    return {log_uniform(1e-2, 1e2), log_uniform(1e-2, 1e2), log_uniform(1e-2, 1e2), log_uniform(1e-2, 1e2)};
  }

  /// Any valid law, including the dry, Newtonian, one-sided and symmetric corners.
  dircrawl::FrictionLaw any_law() {
    double p[4];
    for (auto& x : p) x = coin(0.25) ? 0.0 : log_uniform(1e-2, 1e2);
    switch (pick(6)) {
      case 0: p[2] = p[3] = 0.0; break;
      case 1: p[0] = p[1] = 0.0; break;
      case 2: p[1] = p[0]; p[3] = p[2]; break;
      default: break;
    }
    if (p[0] + p[1] + p[2] + p[3] == 0.0) p[0] = 1.0;
    return {p[0], p[1], p[2], p[3]};
  }

 private:
  std::mt19937_64 rng_;
};

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool close_rel(real a, real b, real rel, real abs_floor = 0) {
  return std::fabs(a - b) <= std::max(rel * std::max(std::fabs(a), std::fabs(b)), abs_floor);
}

}  // namespace oracle
