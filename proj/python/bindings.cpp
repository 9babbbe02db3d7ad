#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dircrawl/analytic.hpp"
#include "dircrawl/cli.hpp"
#include "dircrawl/engine.hpp"
#include "dircrawl/error.hpp"

namespace py = pybind11;
using namespace dircrawl;

namespace {

// The gait variant holds types without default constructors, which the
// stock variant caster cannot load.
GaitProgram to_gait(const py::handle& h) {
  if (py::isinstance<Breather>(h)) return h.cast<Breather>();
  if (py::isinstance<CompositeStride>(h)) return h.cast<CompositeStride>();
  if (py::isinstance<ConstantLength>(h)) return h.cast<ConstantLength>();
  if (py::isinstance<TwoSegmentPath>(h)) return h.cast<TwoSegmentPath>();
  if (py::isinstance<SquareWave>(h)) return h.cast<SquareWave>();
  throw py::type_error("expected a gait (Breather, CompositeStride, ConstantLength, TwoSegmentPath, SquareWave)");
}

py::dict trajectory_dict(const Trajectory& tr) {
  std::vector<std::string> regimes;
  for (auto r : tr.regime) regimes.emplace_back(to_string(r));
  py::dict d;
  d["gait"] = tr.gait;
  d["period"] = tr.period;
  d["dt"] = tr.dt;
  d["t"] = tr.t;
  d["x1"] = tr.x1;
  d["x2"] = tr.x2;
  d["l"] = tr.l;
  d["x1dot"] = tr.x1dot;
  d["regime"] = regimes;
  d["stage"] = tr.stage;
  return d;
}

py::dict cycle_dict(const CycleReport& r) {
  py::list stages;
  for (const auto& s : r.stages) {
    py::dict st;
    st["name"] = s.name;
    st["numeric"] = s.numeric;
    st["analytic"] = s.analytic ? py::cast(*s.analytic) : py::none();
    stages.append(st);
  }
  py::dict d;
  d["net_displacement"] = r.net_displacement;
  d["analytic"] = r.analytic_value ? py::cast(*r.analytic_value) : py::none();
  d["formula"] = r.analytic_formula;
  d["abs_residual"] = r.abs_residual;
  d["stages"] = stages;
  d["notes"] = r.notes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quasi-static crawler on a directional Bingham substrate";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<FrictionLaw>(m, "FrictionLaw")
      .def(py::init<double, double, double, double>(), py::arg("tau_minus"), py::arg("tau_plus"),
           py::arg("mu_minus"), py::arg("mu_plus"))
      .def_static("dry", &FrictionLaw::dry, py::arg("tau_minus"), py::arg("tau_plus"))
      .def_static("newtonian", &FrictionLaw::newtonian, py::arg("mu_minus"), py::arg("mu_plus"))
      .def_property_readonly("tau_minus", &FrictionLaw::tau_minus)
      .def_property_readonly("tau_plus", &FrictionLaw::tau_plus)
      .def_property_readonly("mu_minus", &FrictionLaw::mu_minus)
      .def_property_readonly("mu_plus", &FrictionLaw::mu_plus)
      .def("__eq__", [](const FrictionLaw& a, const FrictionLaw& b) { return a == b; })
      .def("__repr__", [](const FrictionLaw& f) {
        std::ostringstream os;
        os << "FrictionLaw(" << f.tau_minus() << ", " << f.tau_plus() << ", " << f.mu_minus() << ", "
           << f.mu_plus() << ")";
        return os.str();
      });

  m.def("friction", [](const FrictionLaw& law, double v) {
    const auto f = evaluate(law, v);
    return f.set_valued ? py::cast(std::make_pair(f.lo, f.hi)) : py::cast(f.lo);
  }, py::arg("law"), py::arg("v"), "Force density at velocity v; a (lo, hi) pair at v = 0.");
  m.def("is_directional", &is_directional);
  m.def("alpha", &alpha);
  m.def("beta", &beta);

  py::class_<LengthProfile>(m, "LengthProfile")
      .def_static("sine_squared", &LengthProfile::sine_squared, py::arg("base"), py::arg("delta"),
                  py::arg("period"))
      .def_static("triangle", &LengthProfile::triangle, py::arg("base"), py::arg("delta"), py::arg("period"),
                  py::arg("rise_fraction"))
      .def("length", &LengthProfile::length)
      .def("rate", &LengthProfile::rate)
      .def_property_readonly("period", &LengthProfile::period);

  py::class_<Breather>(m, "Breather")
      .def(py::init<double, LengthProfile>(), py::arg("L"), py::arg("profile"))
      .def_static("sine_squared", &Breather::sine_squared, py::arg("L"), py::arg("delta"), py::arg("T"));
  py::class_<CompositeStride>(m, "CompositeStride")
      .def(py::init<double, double, double, double>(), py::arg("lam"), py::arg("delta"), py::arg("h"),
           py::arg("T") = 1.0);
  py::class_<ConstantLength>(m, "ConstantLength")
      .def(py::init<double, double, LengthProfile>(), py::arg("L"), py::arg("Xstar"), py::arg("l1"));
  py::class_<TwoSegmentPath>(m, "TwoSegmentPath")
      .def(py::init<double, double, double, std::vector<std::array<double, 2>>>(), py::arg("L"),
           py::arg("Xstar"), py::arg("T"), py::arg("vertices"));
  py::class_<SquareWave>(m, "SquareWave")
      .def(py::init<double, double, double, double>(), py::arg("L"), py::arg("delta"), py::arg("epsilon"),
           py::arg("c") = 1.0)
      .def_property_readonly("period", &SquareWave::period);

  m.def("simulate", [](const FrictionLaw& law, const py::object& gait, int periods, double dt) {
    return trajectory_dict(simulate(law, to_gait(gait), periods, dt));
  }, py::arg("law"), py::arg("gait"), py::arg("periods") = 1, py::arg("dt") = 0.0);
  m.def("cycle_displacement", [](const FrictionLaw& law, const py::object& gait, double dt) {
    return cycle_dict(cycle_displacement(law, to_gait(gait), dt));
  }, py::arg("law"), py::arg("gait"), py::arg("dt") = 0.0);
  m.def("verify", [](const FrictionLaw& law, const py::object& gait, double dt, double tol) {
    const auto r = verify(law, to_gait(gait), dt, tol);
    py::list checks;
    for (const auto& c : r.checks) {
      py::dict d;
      d["name"] = c.name;
      d["numeric"] = c.numeric;
      d["expected"] = c.expected;
      d["residual"] = c.residual;
      d["pass"] = c.pass;
      checks.append(d);
    }
    py::dict d;
    d["pass"] = r.pass;
    d["checks"] = checks;
    return d;
  }, py::arg("law"), py::arg("gait"), py::arg("dt") = 0.0, py::arg("tolerance") = 1e-6);

  m.def("breather_velocity", &breather_velocity, py::arg("law"), py::arg("ldot"));
  m.def("breather_cycle_displacement", &breather_cycle_displacement, py::arg("law"), py::arg("profile"));
  m.def("composite_stride_displacement", [](const FrictionLaw& law, double lam, double delta, double h) {
    return composite_stride_displacement(law, lam, delta, h).total;
  }, py::arg("law"), py::arg("lam"), py::arg("delta"), py::arg("h"));
  m.def("wave_regime", [](const FrictionLaw& law, double eps, double c, double delta, double L) {
    return std::string(to_string(wave_admissibility(law, eps, c, delta, L).regime));
  }, py::arg("law"), py::arg("epsilon"), py::arg("c"), py::arg("delta"), py::arg("L"));
  m.def("stickslip_displacement", &stickslip_displacement, py::arg("epsilon"), py::arg("delta"));
  m.def("sliding_cycle_displacement", [](const FrictionLaw& law, double eps, double c, double delta, double L) {
    const auto s = sliding_cycle_displacement(law, eps, c, delta, L);
    py::dict d;
    d["total"] = s.total;
    d["stage_a"] = s.stage_a;
    d["stage_b"] = s.stage_b;
    d["stage_c"] = s.stage_c;
    return d;
  }, py::arg("law"), py::arg("epsilon"), py::arg("c"), py::arg("delta"), py::arg("L"));
  m.def("newtonian_sliding_displacement", &newtonian_sliding_displacement, py::arg("beta"),
        py::arg("epsilon"), py::arg("delta"), py::arg("L"));

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "dircrawl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
