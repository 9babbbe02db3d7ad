#include "dircrawl/body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "dircrawl/error.hpp"

namespace dircrawl {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::InvalidArgument, what); }

double reduce_time(double t, double T) {
  if (!std::isfinite(t) || t < 0.0) invalid("time must be finite and >= 0");
  double r = std::fmod(t, T);
  if (r < 0.0) r += T;
  return r;
}

PiecewiseAffineShape two_segment_shape(double L, double Xstar, double l1, double l2) {
  return PiecewiseAffineShape({{0.0, 0.0}, {Xstar, l1}, {L, l1 + l2}});
}

ShapeRate two_segment_rate(double l1dot, double l2dot) {
  return {{{0.0, l1dot}, {l1dot, l1dot + l2dot}}};
}

struct PathPoint {
  double l1, l2, l1dot, l2dot;
};

PathPoint path_point(const TwoSegmentPath& path, double t) {
  const double tau = reduce_time(t, path.T);
  const std::size_t n = path.vertices.size();
  const double edge_time = path.T / static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::floor(tau / edge_time));
  k = std::min(k, n - 1);
  const double u = (tau - static_cast<double>(k) * edge_time) / edge_time;
  const auto& a = path.vertices[k];
  const auto& b = path.vertices[(k + 1) % n];
  return {a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), (b[0] - a[0]) / edge_time,
          (b[1] - a[1]) / edge_time};
}

enum class WaveStage { Entering, Inside, Leaving };

WaveStage wave_stage(const SquareWave& w, double tau) {
  const double ct = w.c * tau;
  if (ct < w.delta) return WaveStage::Entering;
  if (ct < w.L) return WaveStage::Inside;
  return WaveStage::Leaving;
}

struct WavePiece {
  double X0, X1;
  double stretch;  // 1 + epsilon inside the wave, 1 elsewhere
  double rate;     // arc-length rate offset, uniform over the piece
};

// Pieces of a square-wave body at reduced time tau. Pieces shorter than a
// relative 1e-12 are merged away so shapes stay strictly increasing.
std::vector<WavePiece> wave_pieces(const SquareWave& w, double tau) {
  const double ct = w.c * tau;
  const double e = w.epsilon;
  double a = 0.0, b = 0.0, a_dot = 0.0, b_dot = 0.0;
  switch (wave_stage(w, tau)) {
    case WaveStage::Entering: a = 0.0, b = ct, b_dot = w.c; break;
    case WaveStage::Inside: a = ct - w.delta, b = ct, a_dot = b_dot = w.c; break;
    case WaveStage::Leaving: a = ct - w.delta, b = w.L, a_dot = w.c; break;
  }
  const double tiny = 1e-12 * w.L;
  if (a < tiny) a = 0.0;
  if (w.L - b < tiny) b = w.L;
  std::vector<WavePiece> out;
  if (a > 0.0) out.push_back({0.0, a, 1.0, 0.0});
  if (b - a >= tiny) out.push_back({a, b, 1.0 + e, -e * a_dot});
  if (b < w.L) out.push_back({out.empty() ? 0.0 : out.back().X1, w.L, 1.0, e * (b_dot - a_dot)});
  if (out.empty()) out.push_back({0.0, w.L, 1.0, 0.0});
  return out;
}

void validate_profile(const LengthProfile& p, const char* what) {
  if (!(p.period() > 0.0) || !std::isfinite(p.period())) {
    invalid(std::string(what) + ": period must be positive");
  }
  if (p.kind() == LengthProfile::Kind::Triangle &&
      !(p.rise_fraction() > 0.0 && p.rise_fraction() < 1.0)) {
    invalid(std::string(what) + ": rise_fraction must lie in (0, 1)");
  }
}

double profile_max_length(const LengthProfile& p) {
  if (p.kind() != LengthProfile::Kind::Custom) return p.base() + std::max(0.0, p.delta());
  double best = p.length(0.0);
  for (int i = 1; i <= 1000; ++i) best = std::max(best, p.length(p.period() * i / 1000.0));
  for (double c : p.corners()) best = std::max(best, p.length(c));
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseAffineShape

PiecewiseAffineShape::PiecewiseAffineShape(std::vector<ShapeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) invalid("shape needs at least two nodes");
  if (nodes_.front().X != 0.0 || nodes_.front().s != 0.0) invalid("shape must start at (X, s) = (0, 0)");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i].X > nodes_[i - 1].X)) invalid("shape nodes must have strictly increasing X");
    if (!(nodes_[i].s > nodes_[i - 1].s)) invalid("shape must satisfy s' > 0 (strictly increasing s)");
  }
}

PiecewiseAffineShape PiecewiseAffineShape::identity(double L) {
  return PiecewiseAffineShape({{0.0, 0.0}, {L, L}});
}

double PiecewiseAffineShape::arc_length(double X) const {
  if (X < 0.0 || X > reference_length()) invalid("reference coordinate outside [0, L]");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const auto& a = nodes_[i];
    const auto& b = nodes_[i + 1];
    if (X <= b.X) return a.s + (X - a.X) * (b.s - a.s) / (b.X - a.X);
  }
  return nodes_.back().s;
}

// ---------------------------------------------------------------------------
// LengthProfile

LengthProfile LengthProfile::sine_squared(double base, double delta, double period) {
  LengthProfile p;
  p.kind_ = Kind::SineSquared;
  p.base_ = base;
  p.delta_ = delta;
  p.period_ = period;
  p.corners_ = {0.5 * period};
  return p;
}

LengthProfile LengthProfile::triangle(double base, double delta, double period, double rise_fraction) {
  LengthProfile p;
  p.kind_ = Kind::Triangle;
  p.base_ = base;
  p.delta_ = delta;
  p.period_ = period;
  p.rise_fraction_ = rise_fraction;
  p.corners_ = {rise_fraction * period};
  return p;
}

LengthProfile LengthProfile::custom(std::function<double(double)> length,
                                    std::function<double(double)> rate, double period,
                                    std::vector<double> corners) {
  LengthProfile p;
  p.kind_ = Kind::Custom;
  p.period_ = period;
  p.length_fn_ = std::move(length);
  p.rate_fn_ = std::move(rate);
  std::sort(corners.begin(), corners.end());
  p.corners_ = std::move(corners);
  p.base_ = p.length_fn_(0.0);
  return p;
}

double LengthProfile::length(double t) const {
  const double tau = reduce_time(t, period_);
  switch (kind_) {
    case Kind::SineSquared: {
      const double s = std::sin(kPi * tau / period_);
      return base_ + delta_ * s * s;
    }
    case Kind::Triangle: {
      const double rise = rise_fraction_ * period_;
      if (tau < rise) return base_ + delta_ * tau / rise;
      return base_ + delta_ * (period_ - tau) / (period_ - rise);
    }
    case Kind::Custom:
      return length_fn_(tau);
  }
  return base_;
}

double LengthProfile::rate(double t) const {
  const double tau = reduce_time(t, period_);
  switch (kind_) {
    case Kind::SineSquared:
      return delta_ * (kPi / period_) * std::sin(2.0 * kPi * tau / period_);
    case Kind::Triangle: {
      const double rise = rise_fraction_ * period_;
      if (tau < rise) return delta_ / rise;
      return -delta_ / (period_ - rise);
    }
    case Kind::Custom:
      return rate_fn_(tau);
  }
  return 0.0;
}

double LengthProfile::min_length() const {
  if (kind_ != Kind::Custom) return base_ + std::min(0.0, delta_);
  double best = length(0.0);
  for (int i = 1; i <= 1000; ++i) best = std::min(best, length(period_ * i / 1000.0));
  for (double c : corners_) best = std::min(best, length(c));
  return best;
}

double LengthProfile::closure_gap() const {
  if (kind_ != Kind::Custom) return 0.0;
  return std::abs(length_fn_(period_) - length_fn_(0.0));
}

LengthProfile LengthProfile::with_period(double period) const {
  switch (kind_) {
    case Kind::SineSquared: return sine_squared(base_, delta_, period);
    case Kind::Triangle: return triangle(base_, delta_, period, rise_fraction_);
    case Kind::Custom: break;
  }
  const double k = period_ / period;
  std::vector<double> corners;
  for (double c : corners_) corners.push_back(c / k);
  auto len = length_fn_;
  auto rate = rate_fn_;
  return custom([len, k](double t) { return len(t * k); },
                [rate, k](double t) { return rate(t * k) * k; }, period, std::move(corners));
}

bool LengthProfile::operator==(const LengthProfile& other) const {
  return kind_ == other.kind_ && base_ == other.base_ && delta_ == other.delta_ &&
         period_ == other.period_ && rise_fraction_ == other.rise_fraction_ &&
         corners_ == other.corners_;
}

// ---------------------------------------------------------------------------
// Gaits

TwoSegmentPath CompositeStride::path() const {
  const double a = lambda + delta;
  return {2.0 * lambda + delta,
          a,
          T,
          {{a, lambda}, {lambda, a}, {h * lambda, h * a}, {h * a, h * lambda}}};
}

bool edge_is_affine(const TwoSegmentPath& path, std::size_t edge) {
  const auto& a = path.vertices.at(edge);
  const auto& b = path.vertices.at((edge + 1) % path.vertices.size());
  const double cross = a[0] * b[1] - a[1] * b[0];
  return std::abs(cross) <= 1e-12 * std::abs(a[0] * b[1]);
}

namespace {

void validate_path(const TwoSegmentPath& p) {
  if (!(p.L > 0.0)) invalid("two-segment path: L must be positive");
  if (!(p.Xstar > 0.0 && p.Xstar < p.L)) invalid("two-segment path: Xstar must lie in (0, L)");
  if (!(p.T > 0.0)) invalid("two-segment path: T must be positive");
  if (p.vertices.size() < 2) invalid("two-segment path: need at least two vertices");
  for (const auto& v : p.vertices) {
    if (!(v[0] > 0.0 && v[1] > 0.0)) invalid("two-segment path: segment lengths must be positive");
  }
}

struct Validator {
  void operator()(const Breather& b) const {
    if (!(b.L > 0.0)) invalid("breather: L must be positive");
    validate_profile(b.profile, "breather");
    if (!(b.profile.min_length() > 0.0)) invalid("breather: length must stay positive (delta > -L)");
  }
  void operator()(const TwoSegmentPath& p) const { validate_path(p); }
  void operator()(const CompositeStride& s) const {
    if (!(s.lambda > 0.0)) invalid("composite stride: lambda must be positive");
    if (!(s.delta > 0.0)) invalid("composite stride: delta must be positive");
    if (!(s.h > 1.0)) invalid("composite stride: h must exceed 1");
    if (!(s.T > 0.0)) invalid("composite stride: T must be positive");
    const auto path = s.path();
    validate_path(path);
    if (!edge_is_affine(path, 1) || !edge_is_affine(path, 3)) {
      invalid("composite stride: B->C and D->A must keep l1dot/l1 = l2dot/l2");
    }
  }
  void operator()(const ConstantLength& g) const {
    if (!(g.L > 0.0)) invalid("constant-length: L must be positive");
    if (!(g.Xstar > 0.0 && g.Xstar < g.L)) invalid("constant-length: Xstar must lie in (0, L)");
    validate_profile(g.l1, "constant-length");
    if (!(g.l1.min_length() > 0.0) || !(profile_max_length(g.l1) < g.L)) {
      invalid("constant-length: l1(t) must stay inside (0, L)");
    }
  }
  void operator()(const SquareWave& w) const {
    if (!(w.L > 0.0)) invalid("square wave: L must be positive");
    if (!(w.delta > 0.0 && w.delta < w.L)) invalid("square wave: delta must lie in (0, L)");
    if (!(w.epsilon > -1.0) || w.epsilon == 0.0 || !std::isfinite(w.epsilon)) {
      invalid("square wave: epsilon must satisfy epsilon > -1 and epsilon != 0");
    }
    if (!(w.c > 0.0)) invalid("square wave: c must be positive");
  }
};

}  // namespace

void validate(const GaitProgram& gait) { std::visit(Validator{}, gait); }

const char* gait_kind(const GaitProgram& gait) {
  struct {
    const char* operator()(const Breather&) const { return "breather"; }
    const char* operator()(const TwoSegmentPath&) const { return "two_segment_path"; }
    const char* operator()(const CompositeStride&) const { return "composite_stride"; }
    const char* operator()(const ConstantLength&) const { return "constant_length"; }
    const char* operator()(const SquareWave&) const { return "square_wave"; }
  } v;
  return std::visit(v, gait);
}

double period(const GaitProgram& gait) {
  struct {
    double operator()(const Breather& b) const { return b.profile.period(); }
    double operator()(const TwoSegmentPath& p) const { return p.T; }
    double operator()(const CompositeStride& s) const { return s.T; }
    double operator()(const ConstantLength& g) const { return g.l1.period(); }
    double operator()(const SquareWave& w) const { return w.period(); }
  } v;
  return std::visit(v, gait);
}

namespace {

std::vector<double> profile_stages(const LengthProfile& p) {
  std::vector<double> t{0.0};
  for (double c : p.corners()) {
    if (c > 0.0 && c < p.period()) t.push_back(c);
  }
  t.push_back(p.period());
  return t;
}

std::vector<std::string> profile_stage_names(const LengthProfile& p) {
  const auto t = profile_stages(p);
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double r = p.rate(0.5 * (t[i] + t[i + 1]));
    names.push_back(r > 0.0 ? "elongation" : (r < 0.0 ? "contraction" : "rest"));
  }
  // Keep names unique so stage tables stay unambiguous.
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (std::count(names.begin(), names.end(), names[i]) > 1) names[i] += std::to_string(i);
  }
  return names;
}

std::vector<double> path_stages(double T, std::size_t n) {
  std::vector<double> t;
  for (std::size_t k = 0; k < n; ++k) t.push_back(T * static_cast<double>(k) / static_cast<double>(n));
  t.push_back(T);
  return t;
}

}  // namespace

std::vector<double> stage_times(const GaitProgram& gait) {
  validate(gait);
  struct {
    std::vector<double> operator()(const Breather& b) const { return profile_stages(b.profile); }
    std::vector<double> operator()(const TwoSegmentPath& p) const {
      return path_stages(p.T, p.vertices.size());
    }
    std::vector<double> operator()(const CompositeStride& s) const { return path_stages(s.T, 4); }
    std::vector<double> operator()(const ConstantLength& g) const { return profile_stages(g.l1); }
    std::vector<double> operator()(const SquareWave& w) const {
      return {0.0, w.delta / w.c, w.L / w.c, w.period()};
    }
  } v;
  return std::visit(v, gait);
}

std::vector<std::string> stage_names(const GaitProgram& gait) {
  validate(gait);
  struct {
    std::vector<std::string> operator()(const Breather& b) const { return profile_stage_names(b.profile); }
    std::vector<std::string> operator()(const TwoSegmentPath& p) const {
      std::vector<std::string> n;
      for (std::size_t k = 0; k < p.vertices.size(); ++k) n.push_back("edge" + std::to_string(k));
      return n;
    }
    std::vector<std::string> operator()(const CompositeStride&) const { return {"AB", "BC", "CD", "DA"}; }
    std::vector<std::string> operator()(const ConstantLength& g) const { return profile_stage_names(g.l1); }
    std::vector<std::string> operator()(const SquareWave&) const { return {"a", "b", "c"}; }
  } v;
  return std::visit(v, gait);
}

bool is_corner(const GaitProgram& gait, double t) {
  const double T = period(gait);
  const double tau = reduce_time(t, T);
  for (double c : stage_times(gait)) {
    if (std::abs(tau - c) <= 1e-14 * T || std::abs(tau + T - c) <= 1e-14 * T) return true;
  }
  return false;
}

PiecewiseAffineShape shape_at(const GaitProgram& gait, double t) {
  validate(gait);
  struct {
    double t;
    PiecewiseAffineShape operator()(const Breather& b) const {
      return PiecewiseAffineShape({{0.0, 0.0}, {b.L, b.profile.length(t)}});
    }
    PiecewiseAffineShape operator()(const TwoSegmentPath& p) const {
      const auto q = path_point(p, t);
      return two_segment_shape(p.L, p.Xstar, q.l1, q.l2);
    }
    PiecewiseAffineShape operator()(const CompositeStride& s) const { return (*this)(s.path()); }
    PiecewiseAffineShape operator()(const ConstantLength& g) const {
      const double l1 = g.l1.length(t);
      return two_segment_shape(g.L, g.Xstar, l1, g.L - l1);
    }
    PiecewiseAffineShape operator()(const SquareWave& w) const {
      std::vector<ShapeNode> nodes{{0.0, 0.0}};
      for (const auto& p : wave_pieces(w, reduce_time(t, w.period()))) {
        nodes.push_back({p.X1, nodes.back().s + p.stretch * (p.X1 - p.X0)});
      }
      return PiecewiseAffineShape(std::move(nodes));
    }
  } v{t};
  return std::visit(v, gait);
}

ShapeRate rate_at(const GaitProgram& gait, double t) {
  validate(gait);
  struct {
    double t;
    ShapeRate operator()(const Breather& b) const { return {{{0.0, b.profile.rate(t)}}}; }
    ShapeRate operator()(const TwoSegmentPath& p) const {
      const auto q = path_point(p, t);
      return two_segment_rate(q.l1dot, q.l2dot);
    }
    ShapeRate operator()(const CompositeStride& s) const { return (*this)(s.path()); }
    ShapeRate operator()(const ConstantLength& g) const {
      const double l1dot = g.l1.rate(t);
      return two_segment_rate(l1dot, -l1dot);
    }
    ShapeRate operator()(const SquareWave& w) const {
      ShapeRate r;
      for (const auto& p : wave_pieces(w, reduce_time(t, w.period()))) r.pieces.push_back({p.rate, p.rate});
      return r;
    }
  } v{t};
  return std::visit(v, gait);
}

double length(const PiecewiseAffineShape& shape) { return shape.length(); }

namespace {

void check_consistent(const PiecewiseAffineShape& shape, const ShapeRate& rate) {
  if (rate.pieces.size() != shape.piece_count()) {
    std::ostringstream msg;
    msg << "rate has " << rate.pieces.size() << " pieces but shape has " << shape.piece_count();
    invalid(msg.str());
  }
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double eulerian_velocity(const PiecewiseAffineShape& shape, const ShapeRate& rate, double x1dot,
                         double s_query) {
  check_consistent(shape, rate);
  if (!(s_query >= 0.0 && s_query <= shape.length())) invalid("arc-length query outside [0, l]");
  const auto& nodes = shape.nodes();
  const std::size_t n = shape.piece_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (s_query < nodes[i + 1].s || i + 1 == n) {
      const double w = (s_query - nodes[i].s) / (nodes[i + 1].s - nodes[i].s);
      const auto& r = rate.pieces[i];
      return x1dot + r.left + w * (r.right - r.left);
    }
  }
  return x1dot;
}

ZeroSet zero_crossings(const PiecewiseAffineShape& shape, const ShapeRate& rate, double x1dot) {
  check_consistent(shape, rate);
  const auto& nodes = shape.nodes();
  const std::size_t n = shape.piece_count();
  ZeroSet out;

  auto v_left = [&](std::size_t i) { return x1dot + rate.pieces[i].left; };
  auto v_right = [&](std::size_t i) { return x1dot + rate.pieces[i].right; };
  auto vanishes = [&](std::size_t i) { return v_left(i) == 0.0 && v_right(i) == 0.0; };

  for (std::size_t i = 0; i < n; ++i) {
    const double s0 = nodes[i].s;
    const double s1 = nodes[i + 1].s;
    if (vanishes(i)) {
      if (!out.intervals.empty() && out.intervals.back().second == s0) {
        out.intervals.back().second = s1;
      } else {
        out.intervals.emplace_back(s0, s1);
      }
      continue;
    }
    if (i > 0 && !vanishes(i - 1)) {
      const int before = sign(v_right(i - 1)) != 0 ? sign(v_right(i - 1)) : sign(v_left(i - 1));
      const int after = sign(v_left(i)) != 0 ? sign(v_left(i)) : sign(v_right(i));
      if (before * after < 0) out.points.push_back(s0);
    }
    const double a = v_left(i);
    const double b = v_right(i);
    if (a * b < 0.0) out.points.push_back(s0 + (s1 - s0) * a / (a - b));
  }
  return out;
}

}  // namespace dircrawl
