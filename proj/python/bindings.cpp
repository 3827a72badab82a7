#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rough/approximate.hpp"
#include "rough/errors.hpp"
#include "rough/harness.hpp"
#include "rough/measure.hpp"
#include "rough/thickness.hpp"

namespace py = pybind11;
using namespace rough;

namespace {

py::object fraction(const Rational& r) {
  return py::module_::import("fractions").attr("Fraction")(r.numerator(), r.denominator());
}

Rational rational(const py::handle& h) {
  if (py::isinstance<py::int_>(h)) return Rational(h.cast<std::int64_t>());
  return parse_rational(py::str(h).cast<std::string>());
}

py::object json_to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json py_to_json(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return Json::parse(h.cast<std::string>());
  return Json::parse(py::module_::import("json").attr("dumps")(h).cast<std::string>());
}

/// A group with its word metric; sets cross the boundary as sorted lists.
struct PyGroup {
  GroupInstance gi;

  GSet set(const std::vector<Element>& xs) const {
    for (auto x : xs)
      if (x >= gi.group->order()) throw InputError("element " + std::to_string(x) + " outside the group");
    return GSet(gi.group, std::span<const Element>(xs));
  }
};

py::dict run_document(const Scenario& s, const std::string& subcommand, std::optional<std::uint64_t> seed,
                      std::size_t workers, std::optional<std::uint64_t> budget) {
  RunOptions opt;
  opt.only = subcommand == "suite" ? "" : subcommand;
  opt.workers = workers;
  opt.seed = seed;
  opt.budget = budget;
  SuiteResult result;
  {
    py::gil_scoped_release release;
    result = run_suite(s, opt);
  }
  return json_to_py(suite_document(s, result, subcommand, opt));
}

}  // namespace

PYBIND11_MODULE(roughgroups, m) {
  m.doc() = "Rough approximate subgroups on finite groups: exact measures, thickness and certificates.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<PyGroup>(m, "Group")
      .def_static("cyclic", [](std::size_t n) { return PyGroup{make_group(GroupSpec::cyclic(n))}; })
      .def_static("dihedral", [](std::size_t n) { return PyGroup{make_group(GroupSpec::dihedral(n))}; })
      .def_static("heisenberg", [](std::size_t p) { return PyGroup{make_group(GroupSpec::heisenberg(p))}; })
      .def_property_readonly("order", [](const PyGroup& g) { return g.gi.group->order(); })
      .def("mul", [](const PyGroup& g, Element x, Element y) { return g.gi.group->mul(x, y); })
      .def("inv", [](const PyGroup& g, Element x) { return g.gi.group->inv(x); })
      .def("dist", [](const PyGroup& g, Element x, Element y) { return fraction(g.gi.metric->dist(x, y)); })
      .def("ball", [](const PyGroup& g, const py::object& r) { return g.gi.metric->ball(rational(r)).elements(); },
           py::arg("r"))
      .def("product",
           [](const PyGroup& g, const std::vector<Element>& x, const std::vector<Element>& y) {
             return product_set(g.set(x), g.set(y)).elements();
           })
      .def("power", [](const PyGroup& g, const std::vector<Element>& x, std::size_t n) { return power(g.set(x), n).elements(); })
      .def(
          "packing_number",
          [](const PyGroup& g, const std::vector<Element>& y, const py::object& r) {
            return packing_number(*g.gi.metric, g.set(y), rational(r)).value;
          },
          py::arg("Y"), py::arg("r"))
      .def(
          "min_thickness",
          [](const PyGroup& g, const std::vector<Element>& y, const std::vector<Element>& x) {
            return min_thickness(g.set(y), g.set(x)).t_star;
          },
          py::arg("Y"), py::arg("X"))
      .def(
          "is_rough_approximate",
          [](const PyGroup& g, const std::vector<Element>& a, std::int64_t k, const std::vector<Element>& z) {
            const auto res = is_rough_approximate(g.set(a), k, g.set(z));
            return py::make_tuple(res.holds, res.witness.e.elements());
          },
          py::arg("A"), py::arg("K"), py::arg("Z"));

  m.def(
      "run_scenario",
      [](const std::string& path, const std::string& subcommand, std::optional<std::uint64_t> seed,
         std::size_t workers, std::optional<std::uint64_t> budget) {
        return run_document(load_scenario(path), subcommand, seed, workers, budget);
      },
      py::arg("path"), py::arg("subcommand") = "suite", py::arg("seed") = py::none(), py::arg("workers") = 1,
      py::arg("budget") = py::none(), "Runs a scenario file and returns the JSON report as a dict.");
  m.def(
      "run",
      [](const py::object& doc, const std::string& subcommand, std::optional<std::uint64_t> seed,
         std::size_t workers, std::optional<std::uint64_t> budget) {
        return run_document(parse_scenario(py_to_json(doc)), subcommand, seed, workers, budget);
      },
      py::arg("scenario"), py::arg("subcommand") = "suite", py::arg("seed") = py::none(), py::arg("workers") = 1,
      py::arg("budget") = py::none(), "Runs a scenario given as a dict or JSON string.");
  m.def("operations", &operation_names);
}
