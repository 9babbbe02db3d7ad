#include "dircrawl/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dircrawl/error.hpp"

namespace dircrawl {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Sliding: return "sliding";
    case Regime::StickSlip: return "stick_slip";
    case Regime::WholeBodyStick: return "whole_body_stick";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStickTolerance = 1e-12;

// c0 + c1 x + c2 x^2
struct Quadratic {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double x) const { return c0 + x * (c1 + x * c2); }
  double slope(double x) const { return c1 + 2.0 * c2 * x; }

  Quadratic& operator+=(const Quadratic& o) {
    c0 += o.c0;
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }
  friend Quadratic operator*(double k, const Quadratic& q) { return {k * q.c0, k * q.c1, k * q.c2}; }
  friend Quadratic operator+(Quadratic a, const Quadratic& b) { return a += b; }
};

Quadratic square(const Quadratic& affine) {
  return {affine.c0 * affine.c0, 2.0 * affine.c0 * affine.c1, affine.c1 * affine.c1};
}

struct Piece {
  double len;
  double a;  // sdot at left end
  double b;  // sdot at right end
};

std::vector<Piece> pieces_of(const PiecewiseAffineShape& shape, const ShapeRate& rate) {
  if (rate.pieces.size() != shape.piece_count()) {
    std::ostringstream msg;
    msg << "rate has " << rate.pieces.size() << " pieces but shape has " << shape.piece_count();
    fail(ErrorKind::InvalidArgument, msg.str());
  }
  std::vector<Piece> out;
  const auto& nodes = shape.nodes();
  for (std::size_t i = 0; i < rate.pieces.size(); ++i) {
    out.push_back({nodes[i + 1].s - nodes[i].s, rate.pieces[i].left, rate.pieces[i].right});
  }
  return out;
}

ForceValue piece_force(const FrictionLaw& law, const Piece& p, double x) {
  const double va = x + p.a;
  const double vb = x + p.b;
  const double tm = law.tau_minus();
  const double tp = law.tau_plus();
  const double mm = law.mu_minus();
  const double mp = law.mu_plus();
  if (va == 0.0 && vb == 0.0) return ForceValue::interval(-tp * p.len, tm * p.len);
  if (va >= 0.0 && vb >= 0.0) return ForceValue::point(-tp * p.len - mp * p.len * 0.5 * (va + vb));
  if (va <= 0.0 && vb <= 0.0) return ForceValue::point(tm * p.len - mm * p.len * 0.5 * (va + vb));
  // Sign change inside the piece at fraction u0.
  const double u0 = va / (va - vb);
  const double l0 = u0 * p.len;
  const double l1 = p.len - l0;
  double f = 0.0;
  if (va < 0.0) {
    f = (tm * l0 - mm * l0 * 0.5 * va) + (-tp * l1 - mp * l1 * 0.5 * vb);
  } else {
    f = (-tp * l0 - mp * l0 * 0.5 * va) + (tm * l1 - mm * l1 * 0.5 * vb);
  }
  return ForceValue::point(f);
}

// Force contribution of a piece as a polynomial in x, valid on the open
// bracket containing x_mid (sign structure frozen there).
Quadratic piece_polynomial(const FrictionLaw& law, const Piece& p, double x_mid) {
  const double tm = law.tau_minus();
  const double tp = law.tau_plus();
  const double mm = law.mu_minus();
  const double mp = law.mu_plus();
  const double lo = std::min(p.a, p.b);
  const double hi = std::max(p.a, p.b);
  if (x_mid + lo > 0.0) return {-tp * p.len - mp * p.len * 0.5 * (p.a + p.b), -mp * p.len, 0.0};
  if (x_mid + hi < 0.0) return {tm * p.len - mm * p.len * 0.5 * (p.a + p.b), -mm * p.len, 0.0};
  const double d = p.b - p.a;
  // Zero of v at fraction u0 = -(x + a) / d, affine in x.
  const Quadratic u0{-p.a / d, -1.0 / d, 0.0};
  const Quadratic w0{1.0 - u0.c0, -u0.c1, 0.0};  // 1 - u0
  Quadratic f;
  if (d > 0.0) {
    f = tm * u0 + (0.5 * mm * d) * square(u0) + (-tp) * w0 + (-0.5 * mp * d) * square(w0);
  } else {
    f = (-tp) * u0 + (0.5 * mp * d) * square(u0) + tm * w0 + (-0.5 * mm * d) * square(w0);
  }
  return p.len * f;
}

Quadratic total_polynomial(const FrictionLaw& law, const std::vector<Piece>& pieces, double x_mid) {
  Quadratic q;
  for (const auto& p : pieces) q += piece_polynomial(law, p, x_mid);
  return q;
}

ForceValue force_of(const FrictionLaw& law, const std::vector<Piece>& pieces, double x) {
  ForceValue total = ForceValue::point(0.0);
  for (const auto& p : pieces) total += piece_force(law, p, x);
  return total;
}

// Root of a monotone quadratic inside [lo, hi] (finite or not).
double solve_in_bracket(const Quadratic& q, double lo, double hi) {
  double root = std::numeric_limits<double>::quiet_NaN();
  const double scale = std::abs(q.c1) + std::abs(q.c2) * (std::isfinite(lo) && std::isfinite(hi)
                                                              ? std::max(std::abs(lo), std::abs(hi))
                                                              : 1.0);
  if (std::abs(q.c2) <= 1e-15 * scale || q.c2 == 0.0) {
    root = -q.c0 / q.c1;
  } else {
    const double disc = std::max(0.0, q.c1 * q.c1 - 4.0 * q.c2 * q.c0);
    const double t = -0.5 * (q.c1 + std::copysign(std::sqrt(disc), q.c1));
    const double r1 = t / q.c2;
    const double r2 = t != 0.0 ? q.c0 / t : r1;
    const double slack = 1e-9 * (1.0 + std::max(std::isfinite(lo) ? std::abs(lo) : 0.0,
                                                std::isfinite(hi) ? std::abs(hi) : 0.0));
    auto inside = [&](double r, double pad) { return r >= lo - pad && r <= hi + pad; };
    if (inside(r1, 0.0) != inside(r2, 0.0)) {
      root = inside(r1, 0.0) ? r1 : r2;
    } else if (inside(r1, slack) && inside(r2, slack)) {
      root = std::abs(q(r1)) <= std::abs(q(r2)) ? r1 : r2;
    } else if (inside(r1, slack)) {
      root = r1;
    } else if (inside(r2, slack)) {
      root = r2;
    }
  }
  if (!std::isfinite(root) && std::isfinite(lo) && std::isfinite(hi)) {
    // Bisection on the polynomial as a last resort; q(lo) >= 0 >= q(hi).
    double a = lo;
    double b = hi;
    for (int i = 0; i < 200 && b - a > 0.0; ++i) {
      const double m = 0.5 * (a + b);
      (q(m) > 0.0 ? a : b) = m;
    }
    root = 0.5 * (a + b);
  }
  if (std::isfinite(lo)) root = std::max(root, lo);
  if (std::isfinite(hi)) root = std::min(root, hi);
  return root;
}

double midpoint_of(double lo, double hi) {
  if (!std::isfinite(lo)) return hi - 1.0;
  if (!std::isfinite(hi)) return lo + 1.0;
  return 0.5 * (lo + hi);
}

}  // namespace

ForceValue total_force(const FrictionLaw& law, const PiecewiseAffineShape& shape,
                       const ShapeRate& rate, double x1dot) {
  return force_of(law, pieces_of(shape, rate), x1dot);
}

BalanceSolution solve_velocity(const FrictionLaw& law, const PiecewiseAffineShape& shape,
                               const ShapeRate& rate) {
  const auto pieces = pieces_of(shape, rate);

  std::vector<double> breaks;
  double force_scale = 0.0;
  for (const auto& p : pieces) {
    breaks.push_back(-p.a);
    breaks.push_back(-p.b);
    force_scale += p.len * ((law.tau_minus() + law.tau_plus()) +
                            (law.mu_minus() + law.mu_plus()) * std::max(std::abs(p.a), std::abs(p.b)));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double tol = kStickTolerance * force_scale;

  std::vector<ForceValue> at_break;
  for (double b : breaks) at_break.push_back(force_of(law, pieces, b));
  const std::size_t m = breaks.size();

  // Lower end of the solution set: first x (left to right) where F <= 0.
  double s_lo = kInf;
  for (std::size_t k = 0; k <= m && s_lo == kInf; ++k) {
    const double left = k == 0 ? -kInf : breaks[k - 1];
    const double right = k == m ? kInf : breaks[k];
    const double f_right = k == m ? -kInf : at_break[k].hi;  // F(right^-)
    const Quadratic q = total_polynomial(law, pieces, midpoint_of(left, right));
    if (k == m) {
      // Unbounded right ray, F affine.
      if (q.c1 < 0.0) {
        s_lo = std::max(left, -q.c0 / q.c1);
      } else if (std::abs(q.c0) <= tol) {
        s_lo = left;
      }
      break;
    }
    if (f_right <= 0.0) {
      if (k == 0 && !(q.c1 < 0.0)) {
        s_lo = std::abs(q.c0) <= tol ? -kInf : right;
      } else if (f_right >= -tol) {
        // touching zero at the breakpoint; a tangential root is ill-conditioned
        s_lo = right;
      } else {
        s_lo = solve_in_bracket(q, left, right);
      }
      break;
    }
    if (at_break[k].lo <= tol) s_lo = right;
  }

  // Upper end: last x (right to left) where F >= 0.
  double s_hi = -kInf;
  for (std::size_t k = m + 1; k-- > 0 && s_hi == -kInf;) {
    const double left = k == 0 ? -kInf : breaks[k - 1];
    const double right = k == m ? kInf : breaks[k];
    const double f_left = k == 0 ? kInf : at_break[k - 1].lo;  // F(left^+)
    const Quadratic q = total_polynomial(law, pieces, midpoint_of(left, right));
    if (k == 0) {
      if (q.c1 < 0.0) {
        s_hi = std::min(right, -q.c0 / q.c1);
      } else if (std::abs(q.c0) <= tol) {
        s_hi = right;
      }
      break;
    }
    if (f_left >= 0.0) {
      if (k == m && !(q.c1 < 0.0)) {
        s_hi = std::abs(q.c0) <= tol ? kInf : left;
      } else if (f_left <= tol) {
        s_hi = left;
      } else {
        s_hi = solve_in_bracket(q, left, right);
      }
      break;
    }
    if (at_break[k - 1].hi >= -tol) s_hi = left;
  }

  if (s_lo == kInf || s_hi == -kInf) {
    fail(ErrorKind::DegenerateSubstrate,
         "force balance has no solution: unbounded sliding (the substrate cannot resist the forcing)");
  }
  if (s_lo > s_hi) std::swap(s_lo, s_hi);

  BalanceSolution sol;
  sol.x1dot = std::clamp(0.0, s_lo, s_hi);
  if (!std::isfinite(sol.x1dot)) {
    fail(ErrorKind::DegenerateSubstrate, "force balance solution is unbounded");
  }

  const ForceValue f = force_of(law, pieces, sol.x1dot);
  sol.residual = f.contains(0.0) ? 0.0 : std::min(std::abs(f.lo), std::abs(f.hi));
  const ZeroSet zeros = zero_crossings(shape, rate, sol.x1dot);
  sol.stick_intervals = zeros.intervals;
  if (!f.set_valued || zeros.intervals.empty()) {
    sol.regime = Regime::Sliding;
    return sol;
  }
  double stuck = 0.0;
  for (const auto& [a, b] : zeros.intervals) stuck += b - a;
  sol.regime = stuck >= shape.length() ? Regime::WholeBodyStick : Regime::StickSlip;
  // f.lo = sliding part - tau_plus * stuck
  const double sliding_part = f.lo + law.tau_plus() * stuck;
  sol.static_force_density = -sliding_part / stuck;
  return sol;
}

}  // namespace dircrawl
