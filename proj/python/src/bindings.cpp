#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fracss/cli.hpp"
#include "fracss/errors.hpp"
#include "fracss/problem_file.hpp"
#include "fracss/solver.hpp"
#include "fracss/special_functions.hpp"
#include "fracss/verification.hpp"

namespace py = pybind11;
using namespace fracss;

namespace {

SeriesOptions series_options(double tol, int max_terms) {
  SeriesOptions o;
  o.tol = tol;
  o.max_terms = max_terms;
  return o;
}

// Solver output kept on the C++ side so evaluation does not round-trip
// through JSON.
struct PySolution {
  Problem problem;
  SolutionReport report;

  std::string status() const { return report.label(); }

  std::vector<py::tuple> coefficients() const {
    std::vector<py::tuple> out;
    const auto& lat = report.series.lattice();
    for (const auto& [e, c] : report.series.terms()) {
      out.push_back(py::make_tuple(py::tuple(py::cast(e.index)), lat.value(e), c));
    }
    return out;
  }

  std::optional<std::string> closed_form() const {
    if (!report.closed_form) return std::nullopt;
    return report.closed_form->str();
  }

  double evaluate(double t) const {
    if (report.status != SolveStatus::Solved) throw SolveError(SolveError::Kind::Unsupported, {}, "no coefficients");
    return fracss::evaluate(report.series, t);
  }

  std::optional<double> closed_form_value(double t) const {
    if (!report.closed_form) return std::nullopt;
    return report.closed_form->evaluate(t);
  }

  std::string report_json() const { return report_to_json(problem, report).dump(); }
};

PySolution solve_text(const std::string& text, std::optional<int> max_index) {
  PySolution s;
  s.problem = parse_problem(text);
  SolveOptions opt;
  opt.max_index = max_index.value_or(s.problem.options.max_index);
  s.report = solve(s.problem.equation, opt);
  return s;
}

}  // namespace

PYBIND11_MODULE(_fracss, m) {
  m.doc() = "Generalized power series solver for fractional differential equations";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<LatticeError>(m, "LatticeError", PyExc_RuntimeError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_ArithmeticError);

  m.def(
      "mittag_leffler",
      [](double alpha, double beta, double z, double tol, int max_terms) {
        return mittag_leffler(MittagLefflerParams(alpha, beta), z, series_options(tol, max_terms));
      },
      py::arg("alpha"), py::arg("beta"), py::arg("z"), py::arg("tol") = 1e-14, py::arg("max_terms") = 512);
  m.def(
      "kilbas_saigo",
      [](double alpha, double m_, double l, double z, double tol, int max_terms) {
        return kilbas_saigo(KilbasSaigoParams(alpha, m_, l), z, series_options(tol, max_terms));
      },
      py::arg("alpha"), py::arg("m"), py::arg("l"), py::arg("z"), py::arg("tol") = 1e-14, py::arg("max_terms") = 512);
  m.def(
      "wright",
      [](double lambda, double mu, double z, double tol, int max_terms) {
        return wright(WrightParams(lambda, mu), z, series_options(tol, max_terms));
      },
      py::arg("lam"), py::arg("mu"), py::arg("z"), py::arg("tol") = 1e-14, py::arg("max_terms") = 512);
  m.def(
      "generalized_wright",
      [](const std::vector<std::pair<double, double>>& upper, const std::vector<std::pair<double, double>>& lower,
         double z, double tol, int max_terms) {
        std::vector<GeneralizedWrightParams::Pair> u(upper.begin(), upper.end()), l(lower.begin(), lower.end());
        return generalized_wright(GeneralizedWrightParams(u, l), z, series_options(tol, max_terms));
      },
      py::arg("upper"), py::arg("lower"), py::arg("z"), py::arg("tol") = 1e-14, py::arg("max_terms") = 512);

  py::class_<PySolution>(m, "Solution")
      .def_property_readonly("status", &PySolution::status)
      .def_property_readonly("coefficients", &PySolution::coefficients,
                             "(index, exponent value, coefficient) for every nonzero term")
      .def_property_readonly("closed_form", &PySolution::closed_form)
      .def_property_readonly("warnings", [](const PySolution& s) { return s.report.warnings; })
      .def_property_readonly("relations", [](const PySolution& s) { return s.report.recurrence.describe_all(); })
      .def("evaluate", &PySolution::evaluate, py::arg("t"))
      .def("closed_form_value", &PySolution::closed_form_value, py::arg("t"))
      .def("report_json", &PySolution::report_json);

  m.def("solve_text", &solve_text, py::arg("text"), py::arg("max_index") = std::nullopt);

  m.def(
      "brute_force",
      [](const std::string& text, int n) {
        Problem p = parse_problem(text);
        auto bf = brute_force_coefficients(p.equation, build_lattice(p.equation), n);
        py::dict out;
        for (const auto& [idx, v] : bf) out[py::tuple(py::cast(idx))] = v;
        return out;
      },
      py::arg("text"), py::arg("n") = 8);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
