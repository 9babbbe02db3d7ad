#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dircrawl {

struct ShapeNode {
  double X;  // reference coordinate
  double s;  // current arc-length from the left end

  bool operator==(const ShapeNode&) const = default;
};

/// Nodal description of a piecewise-affine arc-length map X -> s(X).
///
/// Invariants: first node is (0, 0), X and s strictly increasing, last X is the
/// reference length.
class PiecewiseAffineShape {
 public:
  explicit PiecewiseAffineShape(std::vector<ShapeNode> nodes);

  static PiecewiseAffineShape identity(double L);

  const std::vector<ShapeNode>& nodes() const noexcept { return nodes_; }
  std::size_t piece_count() const noexcept { return nodes_.size() - 1; }
  double reference_length() const noexcept { return nodes_.back().X; }
  double length() const noexcept { return nodes_.back().s; }

  /// s at reference coordinate X in [0, L].
  double arc_length(double X) const;

  bool operator==(const PiecewiseAffineShape&) const = default;

 private:
  std::vector<ShapeNode> nodes_;
};

/// One-sided arc-length rates at the two ends of a piece; the rate is affine in
/// X inside the piece and may jump across nodes (square waves).
struct PieceRate {
  double left;
  double right;

  bool operator==(const PieceRate&) const = default;
};

struct ShapeRate {
  std::vector<PieceRate> pieces;

  bool operator==(const ShapeRate&) const = default;
};

struct BodyState {
  double x1;
  PiecewiseAffineShape shape;

  double x2() const noexcept { return x1 + shape.length(); }
};

/// Time-periodic length history used by breathers and constant-length crawlers.
class LengthProfile {
 public:
  enum class Kind { SineSquared, Triangle, Custom };

  /// base + delta * sin^2(pi t / period)
  static LengthProfile sine_squared(double base, double delta, double period);
  /// Linear rise to base + delta over rise_fraction * period, linear return.
  static LengthProfile triangle(double base, double delta, double period, double rise_fraction);
  /// Arbitrary profile; `corners` lists the times in (0, period) where the
  /// rate is not smooth or changes sign.
  static LengthProfile custom(std::function<double(double)> length,
                              std::function<double(double)> rate, double period,
                              std::vector<double> corners);

  Kind kind() const noexcept { return kind_; }
  double base() const noexcept { return base_; }
  double delta() const noexcept { return delta_; }
  double period() const noexcept { return period_; }
  double rise_fraction() const noexcept { return rise_fraction_; }

  double length(double t) const;
  double rate(double t) const;
  const std::vector<double>& corners() const noexcept { return corners_; }
  /// Smallest length reached over a period (sampled for custom profiles).
  double min_length() const;
  /// |l(period) - l(0)| of the underlying history, before any reduction
  /// modulo the period. Zero for the built-in kinds.
  double closure_gap() const;

  /// Same profile shape with a different period.
  LengthProfile with_period(double period) const;

  bool operator==(const LengthProfile& other) const;

 private:
  LengthProfile() = default;

  Kind kind_ = Kind::SineSquared;
  double base_ = 0.0;
  double delta_ = 0.0;
  double period_ = 1.0;
  double rise_fraction_ = 0.5;
  std::vector<double> corners_;
  std::function<double(double)> length_fn_;
  std::function<double(double)> rate_fn_;
};

/// One segment deforming affinely: s = X l(t) / L.
struct Breather {
  double L;
  LengthProfile profile;

  static Breather sine_squared(double L, double delta, double T) {
    return {L, LengthProfile::sine_squared(L, delta, T)};
  }

  bool operator==(const Breather&) const = default;
};

/// Two affinely deforming segments split at reference point Xstar, driven
/// around a closed polygon of (l1, l2) vertices; each edge takes T / n.
struct TwoSegmentPath {
  double L;
  double Xstar;
  double T;
  std::vector<std::array<double, 2>> vertices;

  bool operator==(const TwoSegmentPath&) const = default;
};

/// Rectangle A -> B -> C -> D in (l1, l2) space:
/// A = (lambda + delta, lambda), B = (lambda, lambda + delta),
/// C = h B, D = h A.
struct CompositeStride {
  double lambda;
  double delta;
  double h;
  double T;

  TwoSegmentPath path() const;

  bool operator==(const CompositeStride&) const = default;
};

/// Two segments with l1 + l2 = L; l1 follows the profile.
struct ConstantLength {
  double L;
  double Xstar;
  LengthProfile l1;

  bool operator==(const ConstantLength&) const = default;
};

/// Square stretching wave of width delta and amplitude epsilon travelling
/// rightwards at speed c; period (L + delta) / c.
struct SquareWave {
  double L;
  double delta;
  double epsilon;
  double c;

  double period() const noexcept { return (L + delta) / c; }

  bool operator==(const SquareWave&) const = default;
};

using GaitProgram = std::variant<Breather, TwoSegmentPath, CompositeStride, ConstantLength, SquareWave>;

/// Throws Error(InvalidArgument) when the gait parameters violate their invariants.
void validate(const GaitProgram& gait);

const char* gait_kind(const GaitProgram& gait);

double period(const GaitProgram& gait);

/// Stage boundaries over one period, starting at 0 and ending at the period.
/// The rate is smooth inside every stage.
std::vector<double> stage_times(const GaitProgram& gait);
std::vector<std::string> stage_names(const GaitProgram& gait);

/// True when t (mod period) sits on a stage boundary; rates there are
/// right-sided.
bool is_corner(const GaitProgram& gait, double t);

PiecewiseAffineShape shape_at(const GaitProgram& gait, double t);
ShapeRate rate_at(const GaitProgram& gait, double t);

double length(const PiecewiseAffineShape& shape);

/// v = x1dot + sdot at the material point sitting at arc-length s_query.
/// At a node the piece to the right is used (the last piece at s = l).
double eulerian_velocity(const PiecewiseAffineShape& shape, const ShapeRate& rate,
                         double x1dot, double s_query);

struct ZeroSet {
  std::vector<double> points;
  std::vector<std::pair<double, double>> intervals;
};

/// Arc-lengths where the Eulerian velocity changes sign, plus maximal
/// intervals where it vanishes identically.
ZeroSet zero_crossings(const PiecewiseAffineShape& shape, const ShapeRate& rate, double x1dot);

/// Whether an edge of a two-segment path keeps l1dot/l1 == l2dot/l2.
bool edge_is_affine(const TwoSegmentPath& path, std::size_t edge);

}  // namespace dircrawl
