#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <map>
#include <string>

#include "enip/harness.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> as_grid(const std::vector<double>& values, const enip::Grid& g) {
  py::array_t<double> out({g.ny, g.nx});
  auto view = out.mutable_unchecked<2>();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) view(j, i) = values[g.index(i, j)];
  }
  return out;
}

py::dict run_case(const std::string& name, const std::map<std::string, std::string>& overrides) {
  enip::KeyValues flags{{"case", name}};
  for (const auto& [k, v] : overrides) flags.emplace_back(k, v);
  const enip::Settings settings = enip::resolve_settings({}, flags);
  enip::CaseSetup setup = enip::make_case(settings);
  enip::RunResult result;
  {
    py::gil_scoped_release release;
    result = enip::run(setup.config, setup.initial);
  }
  const enip::World& w = result.final_world;
  py::list mass_1;
  py::list mass_2;
  py::list times;
  for (const auto& e : result.ledger) {
    times.append(e.time);
    mass_1.append(e.totals.per_material[0].rho);
    mass_2.append(e.totals.per_material[1].rho);
  }
  py::dict out;
  out["time"] = w.time;
  out["steps"] = result.steps;
  out["alpha"] = as_grid(enip::alpha_field(w.cells), w.grid);
  out["density"] = as_grid(enip::density_field(w.cells), w.grid);
  out["ledger_time"] = times;
  out["mass_1"] = mass_1;
  out["mass_2"] = mass_2;
  const auto& in = result.budget.boundary_inflow;
  const auto& grav = result.budget.gravity;
  out["boundary_inflow"] = py::make_tuple(in.rho, in.mom_x, in.mom_y, in.rhoE);
  out["gravity_work"] = py::make_tuple(grav.rho, grav.mom_x, grav.mom_y, grav.rhoE);
  out["failure"] = result.failure ? py::cast(*result.failure) : py::none();
  if (settings.name == enip::CaseName::SquareAdvection || settings.name == enip::CaseName::Rotation) {
    out["exact_density"] = as_grid(enip::exact_density(settings, w.grid, w.time), w.grid);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-material Eulerian solver with NIP/ENIP interface methods";
  py::register_exception<enip::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<enip::NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

  m.def("run_case", &run_case, py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{},
        "Runs a built-in case with `key = value` overrides and returns the final fields.");

  m.def(
      "exact_riemann",
      [](std::array<double, 3> left, std::array<double, 3> right, double gamma) {
        const enip::ExactRiemann r({left[0], left[1], 0.0, left[2], 0.0}, {right[0], right[1], 0.0, right[2], 0.0},
                                   gamma);
        return std::make_pair(r.p_star(), r.u_star());
      },
      py::arg("left"), py::arg("right"), py::arg("gamma") = 1.4,
      "Star pressure and velocity of an ideal-gas Riemann problem; states are (rho, u, p).");

  m.def(
      "volume_from_line",
      [](std::array<double, 2> n, double d, std::array<double, 4> r) {
        return enip::volume_from_line({n[0], n[1]}, d, {r[0], r[1], r[2], r[3]});
      },
      py::arg("normal"), py::arg("offset"), py::arg("rect"));
  m.def(
      "line_from_volume",
      [](std::array<double, 2> n, double v, std::array<double, 4> r) {
        return enip::line_from_volume({n[0], n[1]}, v, {r[0], r[1], r[2], r[3]}).offset;
      },
      py::arg("normal"), py::arg("volume"), py::arg("rect"));
  m.def(
      "youngs_normal",
      [](const std::array<std::array<double, 3>, 3>& alpha, double dx, double dy) -> py::object {
        const auto n = enip::youngs_normal(alpha, dx, dy);
        if (!n) return py::none();
        return py::make_tuple(n->x, n->y);
      },
      py::arg("alpha"), py::arg("dx") = 1.0, py::arg("dy") = 1.0);
  m.def(
      "loglog_slope",
      [](const std::vector<double>& dx, const std::vector<double>& err) { return enip::loglog_slope(dx, err); },
      py::arg("dx"), py::arg("err"));
  m.def(
      "error_norm",
      [](const std::vector<double>& f, const std::vector<double>& exact, int a) {
        return enip::error_norm(f, exact, a);
      },
      py::arg("field"), py::arg("exact"), py::arg("alpha") = 1);
}
