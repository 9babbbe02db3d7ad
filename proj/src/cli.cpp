#include "dircrawl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "dircrawl/error.hpp"

namespace dircrawl::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& require(const json& obj, const std::string& base, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join_path(base, key), "missing required field");
  return *it;
}

void reject_unknown(const json& obj, const std::string& base, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(join_path(base, key), "unknown key");
  }
}

const json& object_at(const json& parent, const std::string& base, const std::string& key) {
  const auto& v = require(parent, base, key);
  if (!v.is_object()) throw ConfigError(join_path(base, key), "expected an object");
  return v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

double number_at(const json& obj, const std::string& base, const std::string& key) {
  return number(require(obj, base, key), join_path(base, key));
}

double number_or(const json& obj, const std::string& base, const std::string& key, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, join_path(base, key));
}

std::string string_at(const json& obj, const std::string& base, const std::string& key) {
  const auto& v = require(obj, base, key);
  if (!v.is_string()) throw ConfigError(join_path(base, key), "expected a string");
  return v.get<std::string>();
}

std::string string_or(const json& obj, const std::string& base, const std::string& key,
                      const std::string& fallback) {
  return obj.contains(key) ? string_at(obj, base, key) : fallback;
}

void positive(double x, const std::string& path) {
  if (!(x > 0.0)) throw ConfigError(path, "must be positive (got " + format_number(x, 17) + ")");
}

FrictionLaw parse_substrate(const json& s) {
  const std::string base = "substrate";
  reject_unknown(s, base, {"tau_minus", "tau_plus", "mu_minus", "mu_plus"});
  double p[4];
  const char* names[4] = {"tau_minus", "tau_plus", "mu_minus", "mu_plus"};
  for (int i = 0; i < 4; ++i) {
    p[i] = number_or(s, base, names[i], 0.0);
    if (p[i] < 0.0) {
      throw ConfigError(join_path(base, names[i]), "must be non-negative (got " + format_number(p[i], 17) + ")");
    }
  }
  if (p[0] == 0.0 && p[1] == 0.0 && p[2] == 0.0 && p[3] == 0.0) {
    throw ConfigError(base, "at least one coefficient must be positive");
  }
  return FrictionLaw(p[0], p[1], p[2], p[3]);
}

LengthProfile parse_profile(const json& g, const std::string& base, double length_base) {
  const auto kind = string_or(g, base, "profile", "sine_squared");
  const double delta = number_at(g, base, "delta");
  const double T = number_at(g, base, "T");
  positive(T, join_path(base, "T"));
  if (kind == "sine_squared") {
    if (g.contains("rise_fraction")) throw ConfigError(join_path(base, "rise_fraction"), "only used by triangle profiles");
    return LengthProfile::sine_squared(length_base, delta, T);
  }
  if (kind == "triangle") {
    const double rise = number_or(g, base, "rise_fraction", 0.5);
    if (!(rise > 0.0 && rise < 1.0)) throw ConfigError(join_path(base, "rise_fraction"), "must lie in (0, 1)");
    return LengthProfile::triangle(length_base, delta, T, rise);
  }
  throw ConfigError(join_path(base, "profile"), "expected sine_squared or triangle (got '" + kind + "')");
}

GaitProgram parse_gait(const json& g, std::optional<WaveRegime>& requested) {
  const std::string base = "gait";
  const auto kind = string_at(g, base, "kind");
  GaitProgram gait = Breather::sine_squared(1.0, 1.0, 1.0);
  if (kind == "breather") {
    reject_unknown(g, base, {"kind", "L", "delta", "T", "profile", "rise_fraction"});
    const double L = number_at(g, base, "L");
    positive(L, "gait.L");
    const double delta = number_at(g, base, "delta");
    if (!(L + std::min(delta, 0.0) > 0.0)) throw ConfigError("gait.delta", "length must stay positive");
    gait = Breather{L, parse_profile(g, base, L)};
  } else if (kind == "constant_length") {
    reject_unknown(g, base, {"kind", "L", "Xstar", "delta", "T", "profile", "rise_fraction"});
    const double L = number_at(g, base, "L");
    positive(L, "gait.L");
    const double X = number_at(g, base, "Xstar");
    if (!(X > 0.0 && X < L)) throw ConfigError("gait.Xstar", "must lie in (0, L)");
    gait = ConstantLength{L, X, parse_profile(g, base, X)};
  } else if (kind == "composite_stride") {
    reject_unknown(g, base, {"kind", "lambda", "delta", "h", "T"});
    CompositeStride s{number_at(g, base, "lambda"), number_at(g, base, "delta"), number_at(g, base, "h"),
                      number_or(g, base, "T", 1.0)};
    positive(s.lambda, "gait.lambda");
    positive(s.delta, "gait.delta");
    if (!(s.h > 1.0)) throw ConfigError("gait.h", "must exceed 1");
    positive(s.T, "gait.T");
    gait = s;
  } else if (kind == "two_segment_path") {
    reject_unknown(g, base, {"kind", "L", "Xstar", "T", "vertices"});
    TwoSegmentPath p{number_at(g, base, "L"), number_at(g, base, "Xstar"), number_or(g, base, "T", 1.0), {}};
    positive(p.L, "gait.L");
    if (!(p.Xstar > 0.0 && p.Xstar < p.L)) throw ConfigError("gait.Xstar", "must lie in (0, L)");
    positive(p.T, "gait.T");
    const auto& verts = require(g, base, "vertices");
    if (!verts.is_array() || verts.size() < 2) throw ConfigError("gait.vertices", "expected at least two [l1, l2] pairs");
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const std::string path = "gait.vertices[" + std::to_string(i) + "]";
      if (!verts[i].is_array() || verts[i].size() != 2) throw ConfigError(path, "expected [l1, l2]");
      const double l1 = number(verts[i][0], path);
      const double l2 = number(verts[i][1], path);
      if (!(l1 > 0.0 && l2 > 0.0)) throw ConfigError(path, "segment lengths must be positive");
      p.vertices.push_back({l1, l2});
    }
    gait = p;
  } else if (kind == "square_wave") {
    reject_unknown(g, base, {"kind", "L", "delta", "epsilon", "c", "regime"});
    SquareWave w{number_at(g, base, "L"), number_at(g, base, "delta"), number_at(g, base, "epsilon"),
                 number_or(g, base, "c", 1.0)};
    positive(w.L, "gait.L");
    positive(w.delta, "gait.delta");
    if (!(w.delta < w.L)) throw ConfigError("gait.delta", "must be smaller than L");
    if (!(w.epsilon > -1.0) || w.epsilon == 0.0) throw ConfigError("gait.epsilon", "must exceed -1 and be non-zero");
    positive(w.c, "gait.c");
    if (g.contains("regime")) {
      const auto r = string_at(g, base, "regime");
      if (r == "stick_slip") requested = WaveRegime::StickSlip;
      else if (r == "sliding") requested = WaveRegime::Sliding;
      else throw ConfigError("gait.regime", "expected stick_slip or sliding (got '" + r + "')");
    }
    gait = w;
  } else {
    throw ConfigError("gait.kind", "unknown gait kind '" + kind + "'");
  }
  try {
    validate(gait);
  } catch (const Error& e) {
    throw ConfigError("gait", e.what());
  }
  return gait;
}

const std::set<std::string>& sweep_fields() {
  static const std::set<std::string> fields{"tau_minus", "tau_plus", "mu_minus", "mu_plus", "alpha",
                                            "beta", "L", "delta", "T", "epsilon", "c", "lambda",
                                            "h", "Xstar", "rise_fraction"};
  return fields;
}

std::vector<SweepAxis> parse_sweep(const json& s) {
  reject_unknown(s, "sweep", {"axes"});
  const auto& axes = require(s, "sweep", "axes");
  if (!axes.is_array()) throw ConfigError("sweep.axes", "expected an array");
  std::vector<SweepAxis> out;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string base = "sweep.axes[" + std::to_string(i) + "]";
    const auto& a = axes[i];
    if (!a.is_object()) throw ConfigError(base, "expected an object");
    reject_unknown(a, base, {"field", "values", "start", "stop", "count"});
    SweepAxis axis{string_at(a, base, "field"), {}};
    if (!sweep_fields().count(axis.field)) throw ConfigError(join_path(base, "field"), "unknown field '" + axis.field + "'");
    if (a.contains("values")) {
      if (a.contains("start") || a.contains("stop") || a.contains("count")) {
        throw ConfigError(base, "give either values or start/stop/count");
      }
      const auto& v = a["values"];
      if (!v.is_array()) throw ConfigError(join_path(base, "values"), "expected an array");
      for (std::size_t k = 0; k < v.size(); ++k) {
        axis.values.push_back(number(v[k], base + ".values[" + std::to_string(k) + "]"));
      }
    } else {
      const double start = number_at(a, base, "start");
      const double stop = number_at(a, base, "stop");
      const auto& cv = require(a, base, "count");
      if (!cv.is_number_integer() || cv.get<long long>() < 1) throw ConfigError(join_path(base, "count"), "expected a positive integer");
      const auto n = cv.get<long long>();
      for (long long k = 0; k < n; ++k) {
        axis.values.push_back(n == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(n - 1));
      }
    }
    out.push_back(std::move(axis));
  }
  return out;
}

// Best-effort line lookup: follow the object keys of `path` through the text.
std::optional<int> locate(std::string_view text, const std::string& path) {
  std::size_t pos = 0;
  std::string segment;
  std::istringstream in(path);
  bool found_any = false;
  while (std::getline(in, segment, '.')) {
    const auto bracket = segment.find('[');
    if (bracket != std::string::npos) segment.resize(bracket);
    if (segment.empty()) continue;
    const auto hit = text.find("\"" + segment + "\"", pos);
    if (hit == std::string_view::npos) break;
    pos = hit;
    found_any = true;
  }
  if (!found_any) return std::nullopt;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  if (!(law == other.law && gait == other.gait && requested_regime == other.requested_regime &&
        numeric == other.numeric && output == other.output && axes.size() == other.axes.size())) {
    return false;
  }
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].field != other.axes[i].field || axes[i].values != other.axes[i].values) return false;
  }
  return true;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(doc, "", {"schema", "substrate", "gait", "numeric", "output", "sweep"});
  const auto schema = string_at(doc, "", "schema");
  if (schema != kSchema) throw ConfigError("schema", "expected '" + std::string(kSchema) + "' (got '" + schema + "')");

  RunConfig cfg;
  cfg.law = parse_substrate(object_at(doc, "", "substrate"));
  cfg.gait = parse_gait(object_at(doc, "", "gait"), cfg.requested_regime);
  if (cfg.requested_regime && !std::holds_alternative<SquareWave>(cfg.gait)) {
    throw ConfigError("gait.regime", "only square waves have a regime");
  }

  if (doc.contains("numeric")) {
    const auto& n = object_at(doc, "", "numeric");
    reject_unknown(n, "numeric", {"dt", "periods", "tolerance"});
    cfg.numeric.dt = number_or(n, "numeric", "dt", 0.0);
    if (cfg.numeric.dt < 0.0) throw ConfigError("numeric.dt", "must be non-negative");
    if (n.contains("periods")) {
      const auto& p = n["periods"];
      if (!p.is_number_integer() || p.get<long long>() < 1 || p.get<long long>() > 1000000) {
        throw ConfigError("numeric.periods", "expected a positive integer");
      }
      cfg.numeric.periods = static_cast<int>(p.get<long long>());
    }
    cfg.numeric.tolerance = number_or(n, "numeric", "tolerance", cfg.numeric.tolerance);
    positive(cfg.numeric.tolerance, "numeric.tolerance");
  }
  if (doc.contains("output")) {
    const auto& o = object_at(doc, "", "output");
    reject_unknown(o, "output", {"format", "path", "precision"});
    cfg.output.format = string_or(o, "output", "format", cfg.output.format);
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
      throw ConfigError("output.format", "expected csv or json (got '" + cfg.output.format + "')");
    }
    cfg.output.path = string_or(o, "output", "path", "");
    if (o.contains("precision")) {
      const auto& p = o["precision"];
      if (!p.is_number_integer() || p.get<long long>() < 1 || p.get<long long>() > 17) {
        throw ConfigError("output.precision", "expected an integer in [1, 17]");
      }
      cfg.output.precision = static_cast<int>(p.get<long long>());
    }
  }
  if (doc.contains("sweep")) cfg.axes = parse_sweep(object_at(doc, "", "sweep"));
  return cfg;
}

RunConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    if (const auto line = locate(text, e.path())) {
      throw ConfigError(e.path(), std::string(e.what()).substr(e.path().size() + 2) + " (line " +
                                      std::to_string(*line) + ")");
    }
    throw;
  } catch (const Error& e) {
    throw ConfigError("", e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

void put_profile(ordered_json& g, const LengthProfile& p) {
  switch (p.kind()) {
    case LengthProfile::Kind::SineSquared:
      g["profile"] = "sine_squared";
      break;
    case LengthProfile::Kind::Triangle:
      g["profile"] = "triangle";
      g["rise_fraction"] = p.rise_fraction();
      break;
    case LengthProfile::Kind::Custom:
      fail(ErrorKind::Unsupported, "custom length profiles have no config form");
  }
  g["delta"] = p.delta();
  g["T"] = p.period();
}

ordered_json gait_json(const GaitProgram& gait, const std::optional<WaveRegime>& requested) {
  ordered_json g;
  g["kind"] = gait_kind(gait);
  std::visit(
      [&](const auto& v) {
        using G = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<G, Breather>) {
          g["L"] = v.L;
          put_profile(g, v.profile);
        } else if constexpr (std::is_same_v<G, ConstantLength>) {
          g["L"] = v.L;
          g["Xstar"] = v.Xstar;
          put_profile(g, v.l1);
        } else if constexpr (std::is_same_v<G, CompositeStride>) {
          g["lambda"] = v.lambda;
          g["delta"] = v.delta;
          g["h"] = v.h;
          g["T"] = v.T;
        } else if constexpr (std::is_same_v<G, TwoSegmentPath>) {
          g["L"] = v.L;
          g["Xstar"] = v.Xstar;
          g["T"] = v.T;
          g["vertices"] = ordered_json::array();
          for (const auto& vert : v.vertices) g["vertices"].push_back({vert[0], vert[1]});
        } else if constexpr (std::is_same_v<G, SquareWave>) {
          g["L"] = v.L;
          g["delta"] = v.delta;
          g["epsilon"] = v.epsilon;
          g["c"] = v.c;
          if (requested) g["regime"] = to_string(*requested);
        }
      },
      gait);
  return g;
}

ordered_json law_json(const FrictionLaw& law) {
  return {{"tau_minus", law.tau_minus()},
          {"tau_plus", law.tau_plus()},
          {"mu_minus", law.mu_minus()},
          {"mu_plus", law.mu_plus()}};
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); }

}  // namespace

ordered_json to_json(const RunConfig& config) {
  ordered_json doc;
  doc["schema"] = kSchema;
  doc["substrate"] = law_json(config.law);
  doc["gait"] = gait_json(config.gait, config.requested_regime);
  doc["numeric"] = {{"dt", config.numeric.dt},
                    {"periods", config.numeric.periods},
                    {"tolerance", config.numeric.tolerance}};
  doc["output"] = {{"format", config.output.format},
                   {"path", config.output.path},
                   {"precision", config.output.precision}};
  if (!config.axes.empty()) {
    ordered_json axes = ordered_json::array();
    for (const auto& a : config.axes) axes.push_back({{"field", a.field}, {"values", a.values}});
    doc["sweep"] = {{"axes", axes}};
  }
  return doc;
}

std::string format_number(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj, int precision) {
  std::string out = "t,x1,x2,l,regime\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    // Each sample carries the regime of the step that ends on it; t = 0 takes the first step's.
    const auto& r = traj.regime[i == 0 ? 0 : i - 1];
    out += format_number(traj.t[i], precision) + ',' + format_number(traj.x1[i], precision) + ',' +
           format_number(traj.x2[i], precision) + ',' + format_number(traj.l[i], precision) + ',' +
           to_string(r) + '\n';
  }
  return out;
}

ordered_json trajectory_json(const Trajectory& traj) {
  ordered_json regimes = ordered_json::array();
  for (std::size_t i = 0; i < traj.t.size(); ++i) regimes.push_back(to_string(traj.regime[i == 0 ? 0 : i - 1]));
  return {{"gait", traj.gait},
          {"period", traj.period},
          {"dt", traj.dt},
          {"net_displacement", traj.x1.back() - traj.x1.front()},
          {"t", traj.t},
          {"x1", traj.x1},
          {"x2", traj.x2},
          {"l", traj.l},
          {"regime", regimes}};
}

ordered_json admissibility_json(const WaveAdmissibility& adm) {
  return {{"regime", to_string(adm.regime)},
          {"delta_max", adm.delta_max},
          {"delta_max_stick_slip", adm.delta_max_stick_slip},
          {"delta_max_sliding", adm.delta_max_sliding},
          {"stick_slip_violation", adm.stick_slip_violation},
          {"sliding_violation", adm.sliding_violation},
          {"reason", adm.violated_condition}};
}

ordered_json cycle_json(const CycleReport& report) {
  ordered_json stages = ordered_json::array();
  for (const auto& s : report.stages) {
    ordered_json regimes = ordered_json::array();
    for (auto r : s.regimes) regimes.push_back(to_string(r));
    stages.push_back({{"name", s.name}, {"numeric", s.numeric}, {"analytic", optional_number(s.analytic)}, {"regimes", regimes}});
  }
  ordered_json out = {{"net_displacement", report.net_displacement},
                      {"analytic", optional_number(report.analytic_value)},
                      {"formula", report.analytic_formula},
                      {"abs_residual", report.abs_residual},
                      {"rel_residual", report.rel_residual},
                      {"steps", report.steps},
                      {"dt", report.dt},
                      {"stages", stages}};
  if (report.admissibility) out["admissibility"] = admissibility_json(*report.admissibility);
  out["notes"] = report.notes;
  return out;
}

ordered_json analytic_report(const RunConfig& config) {
  ordered_json out;
  out["gait"] = gait_kind(config.gait);
  ordered_json sub = law_json(config.law);
  sub["directional"] = is_directional(config.law);
  if (config.law.tau_minus() + config.law.tau_plus() > 0.0) sub["alpha"] = alpha(config.law);
  if (config.law.mu_plus() > 0.0) sub["beta"] = beta(config.law);
  out["substrate"] = sub;

  std::optional<WaveAdmissibility> adm;
  if (const auto* w = std::get_if<SquareWave>(&config.gait)) {
    adm = wave_admissibility(config.law, w->epsilon, w->c, w->delta, w->L);
  }

  if (adm && config.requested_regime) {
    // A requested regime is reported on its own terms: either it holds or the
    // first violated condition is named.
    const bool stick = *config.requested_regime == WaveRegime::StickSlip;
    const auto& why = stick ? adm->stick_slip_violation : adm->sliding_violation;
    out["requested_regime"] = to_string(*config.requested_regime);
    out["regime"] = why.empty() ? to_string(*config.requested_regime) : "infeasible";
    out["reason"] = why;
    if (why.empty()) {
      const auto* w = std::get_if<SquareWave>(&config.gait);
      if (stick) {
        out["net_displacement"] = stickslip_displacement(w->epsilon, w->delta);
        out["formula"] = "stick_slip_wave";
      } else {
        const auto d = sliding_cycle_displacement(config.law, w->epsilon, w->c, w->delta, w->L);
        out["net_displacement"] = d.total;
        out["formula"] = d.degenerate_branch ? "sliding_wave_degenerate" : "sliding_wave";
        out["stages"] = {{"a", d.stage_a}, {"b", d.stage_b}, {"c", d.stage_c}};
      }
    } else {
      out["net_displacement"] = nullptr;
    }
    out["admissibility"] = admissibility_json(*adm);
    return out;
  }

  const auto cycle = analytic_cycle(config.law, config.gait);
  if (adm) {
    out["regime"] = to_string(adm->regime);
    out["reason"] = adm->violated_condition;
  }
  if (cycle) {
    out["net_displacement"] = cycle->total;
    out["formula"] = cycle->formula;
    if (!cycle->stages.empty()) {
      const auto names = stage_names(config.gait);
      ordered_json stages;
      for (std::size_t i = 0; i < cycle->stages.size() && i < names.size(); ++i) stages[names[i]] = cycle->stages[i];
      out["stages"] = stages;
    }
  } else if (adm) {
    out["net_displacement"] = nullptr;
  } else {
    fail(ErrorKind::Unsupported, std::string("no closed form for this substrate and ") + gait_kind(config.gait) +
                                     " gait; use simulate");
  }
  if (const auto* s = std::get_if<CompositeStride>(&config.gait)) {
    if (config.law.is_dry() || config.law.is_newtonian()) {
      out["reversal"] = {{"bound", config.law.is_dry() ? dry_reversal_bound(s->lambda, s->delta, s->h)
                                                       : newtonian_reversal_bound(s->lambda, s->delta, s->h)},
                         {"negative_feasible", negative_displacement_feasible(config.law, s->lambda, s->delta, s->h)}};
    }
  }
  if (adm) out["admissibility"] = admissibility_json(*adm);
  return out;
}

ordered_json verify_json(const VerifyReport& report, double tolerance) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"numeric", c.numeric},
                      {"expected", c.expected},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  }
  return {{"pass", report.pass}, {"tolerance", tolerance}, {"checks", checks}, {"cycle", cycle_json(report.cycle)}};
}

std::string sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows, int precision) {
  std::string out;
  for (const auto& a : axes) out += a.field + ',';
  out += "net_displacement,analytic,abs_residual,regimes,error\n";
  for (const auto& row : rows) {
    for (double v : row.values) out += format_number(v, precision) + ',';
    if (row.report) {
      const auto& r = *row.report;
      std::string regimes;
      std::set<std::string> seen;
      for (const auto& s : r.stages) {
        for (auto reg : s.regimes) {
          if (seen.insert(to_string(reg)).second) regimes += (regimes.empty() ? "" : "|") + std::string(to_string(reg));
        }
      }
      out += format_number(r.net_displacement, precision) + ',' +
             (r.analytic_value ? format_number(*r.analytic_value, precision) : "") + ',' +
             (r.analytic_value ? format_number(r.abs_residual, precision) : "") + ',' + regimes + ",\n";
    } else {
      std::string msg = row.error;
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      }
      out += ",,,," + msg + '\n';
    }
  }
  return out;
}

ordered_json sweep_json(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
  ordered_json fields = ordered_json::array();
  for (const auto& a : axes) fields.push_back(a.field);
  ordered_json out_rows = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r = {{"index", row.index}, {"values", row.values}};
    if (row.report) r["report"] = cycle_json(*row.report);
    else r["error"] = row.error;
    out_rows.push_back(r);
  }
  return {{"fields", fields}, {"rows", out_rows}};
}

std::string curve_csv(const CurveTable& table, int precision) {
  std::string out = table.parameter_name + ",epsilon,value\n";
  for (const auto& p : table.points) {
    out += format_number(p.parameter, precision) + ',' + format_number(p.epsilon, precision) + ',' +
           format_number(p.value, precision) + '\n';
  }
  return out;
}

ordered_json curve_json(const CurveTable& table) {
  ordered_json points = ordered_json::array();
  for (const auto& p : table.points) points.push_back({p.parameter, p.epsilon, p.value});
  return {{"parameter", table.parameter_name}, {"columns", {table.parameter_name, "epsilon", "value"}}, {"points", points}};
}

namespace {

struct Common {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<double> dt;
  std::optional<int> periods;
};

void add_common(CLI::App* sub, Common& c, bool with_periods) {
  sub->add_option("--config,-c", c.config_path, "JSON run configuration")->required();
  sub->add_option("--out,-o", c.out_path, "Output file (default: output.path or stdout)");
  sub->add_option("--format,-f", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--dt", c.dt, "Quadrature step (0 = period/2000)");
  if (with_periods) sub->add_option("--periods,-n", c.periods, "Number of periods")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Common& c) {
  auto cfg = load_config(c.config_path);
  if (!c.out_path.empty()) cfg.output.path = c.out_path;
  if (!c.format.empty()) cfg.output.format = c.format;
  if (c.dt) {
    if (*c.dt < 0.0 || !std::isfinite(*c.dt)) throw ConfigError("numeric.dt", "must be non-negative");
    cfg.numeric.dt = *c.dt;
  }
  if (c.periods) cfg.numeric.periods = *c.periods;
  return cfg;
}

void emit(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot write output file '" + path + "'");
  f << body;
  if (!f) fail(ErrorKind::InvalidArgument, "failed writing '" + path + "'");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(what, "cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError(what, "empty list");
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-static crawling on directional frictional substrates", "dircrawl"};
  app.require_subcommand(1);

  Common sim, ana, ver, swp;
  double tolerance_override = 0.0;
  auto* c_sim = app.add_subcommand("simulate", "Integrate the trajectory and write t,x1,x2,l,regime");
  add_common(c_sim, sim, true);
  auto* c_ana = app.add_subcommand("analytic", "Evaluate the closed-form displacement (JSON)");
  add_common(c_ana, ana, false);
  auto* c_ver = app.add_subcommand("verify", "Compare simulation with the closed form; exit 0 iff all checks pass");
  add_common(c_ver, ver, false);
  c_ver->add_option("--tolerance,-t", tolerance_override, "Relative tolerance");
  auto* c_swp = app.add_subcommand("sweep", "One-period displacement over a parameter grid");
  add_common(c_swp, swp, false);
  unsigned workers = 0;
  c_swp->add_option("--workers,-j", workers, "Worker threads (default: DIRCRAWL_WORKERS or hardware)");

  std::string figure_name, fig_out, fig_format = "csv", params_text, eps_text;
  double fig_L = 1.0, delta_over_L = 0.25;
  int fig_precision = 17;
  auto* c_fig = app.add_subcommand("figure", "Curve families: fig6 (stick-slip, dry) or fig7 (sliding, Newtonian)");
  c_fig->add_option("name", figure_name, "fig6 or fig7")->required()->check(CLI::IsMember({"fig6", "fig7"}));
  c_fig->add_option("--out,-o", fig_out, "Output file (default stdout)");
  c_fig->add_option("--format,-f", fig_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  c_fig->add_option("--params,-p", params_text, "Comma list of alpha (fig6) or beta^2 (fig7) values");
  c_fig->add_option("--epsilons,-e", eps_text, "Comma list of epsilon values");
  c_fig->add_option("--L", fig_L, "Body length for fig6");
  c_fig->add_option("--delta-over-L", delta_over_L, "Wave width ratio for fig7");
  c_fig->add_option("--precision", fig_precision, "Significant digits in CSV")->check(CLI::Range(1, 17));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dircrawl: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*c_sim) {
      const auto cfg = resolve(sim);
      const auto traj = simulate(cfg.law, cfg.gait, cfg.numeric.periods, cfg.numeric.dt);
      emit(cfg.output.path,
           cfg.output.format == "json" ? dump(trajectory_json(traj)) : trajectory_csv(traj, cfg.output.precision), out);
    } else if (*c_ana) {
      const auto cfg = resolve(ana);
      emit(cfg.output.path, dump(analytic_report(cfg)), out);
    } else if (*c_ver) {
      const auto cfg = resolve(ver);
      const double tol = tolerance_override > 0.0 ? tolerance_override : cfg.numeric.tolerance;
      const auto report = verify(cfg.law, cfg.gait, cfg.numeric.dt, tol);
      emit(cfg.output.path, dump(verify_json(report, tol)), out);
      if (!report.pass) {
        err << "dircrawl: verification failed\n";
        return kRuntimeFailure;
      }
    } else if (*c_swp) {
      const auto cfg = resolve(swp);
      if (cfg.axes.empty()) throw ConfigError("sweep.axes", "sweep needs at least one axis");
      SweepSpec spec{cfg.law, cfg.gait, cfg.numeric.dt, cfg.axes};
      const auto rows = sweep(spec, workers);
      emit(cfg.output.path,
           cfg.output.format == "json" ? dump(sweep_json(cfg.axes, rows))
                                       : sweep_csv(cfg.axes, rows, cfg.output.precision),
           out);
    } else if (*c_fig) {
      const bool six = figure_name == "fig6";
      const auto params = params_text.empty()
                              ? (six ? std::vector<double>{0.25, 0.5, 0.75} : std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0})
                              : parse_list(params_text, "--params");
      const auto eps = eps_text.empty() ? (six ? default_figure6_epsilons() : default_figure7_epsilons())
                                        : parse_list(eps_text, "--epsilons");
      CurveTable table;
      try {
        table = six ? figure6_data(params, eps, fig_L) : figure7_data(params, eps, delta_over_L);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) throw ConfigError("figure", e.what());
        throw;
      }
      emit(fig_out, fig_format == "json" ? dump(curve_json(table)) : curve_csv(table, fig_precision), out);
    }
  } catch (const ConfigError& e) {
    err << "dircrawl: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "dircrawl: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace dircrawl::cli
