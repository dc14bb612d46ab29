#pragma once

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "fracss/problem_file.hpp"
#include "fracss/solver.hpp"

namespace oracle {

inline double gamma(double x) { return boost::math::tgamma(x); }

inline double rel_err(double got, double want) {
  double d = std::abs(got - want);
  return d == 0.0 ? 0.0 : d / std::max(std::abs(want), 1e-300);
}

// erf by its Maclaurin series in long double; fine for |x| <= 3.
inline long double erf_series(long double x) {
  long double term = x;
  long double sum = x;
  for (int n = 1; n < 400; ++n) {
    term *= -x * x / n;
    long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
  }
  return sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L);
}

// E_{1/2}(z) = exp(z^2) erfc(-z)
inline double ml_half(double z) {
  long double zz = z;
  return static_cast<double>(std::exp(zz * zz) * (1.0L + erf_series(zz)));
}

}  // namespace oracle

// Problem files for the worked examples, built from their parameters.
namespace examples {

using nlohmann::json;

// D^alpha y = y
inline std::string relaxation(double alpha, double y0 = 1.0) {
  json j = {{"parameters", {{"alpha", alpha}}},
            {"terms", {{{"coeff", 1}, {"derivative", {{"kind", "caputo"}, {"order", "alpha"}}}}, {{"coeff", -1}}}},
            {"initial_conditions", {{"y(0)", y0}}}};
  return j.dump();
}

// D^alpha y + w^2 y = 0, 1 < alpha < 2
inline std::string oscillation(double alpha, double w, double c0, double c1) {
  json j = {{"parameters", {{"alpha", alpha}}},
            {"terms", {{{"coeff", 1}, {"derivative", {{"kind", "caputo"}, {"order", "alpha"}}}}, {{"coeff", w * w}}}},
            {"initial_conditions", {{"y(0)", c0}, {"y'(0)", c1}}}};
  return j.dump();
}

// y^(n) = b t^beta y, y^(k-1)(0) = c[k-1]
inline std::string classical_kilbas_saigo(int n, double beta, double b, const std::vector<double>& c) {
  json ics = json::object();
  for (std::size_t k = 0; k < c.size(); ++k) ics["y^(" + std::to_string(k) + ")(0)"] = c[k];
  json j = {{"parameters", {{"beta", beta}}},
            {"terms",
             {{{"coeff", 1}, {"derivative", {{"kind", "classical"}, {"order", n}}}},
              {{"coeff", -b}, {"monomial", "beta"}}}},
            {"initial_conditions", ics}};
  return j.dump();
}

// D^alpha y = lambda t^beta y
inline std::string anomalous_relaxation(double alpha, double beta, double lambda, double y0 = 1.0) {
  json j = {{"parameters", {{"alpha", alpha}, {"beta", beta}}},
            {"terms",
             {{{"coeff", 1}, {"derivative", {{"kind", "caputo"}, {"order", "alpha"}}}},
              {{"coeff", -lambda}, {"monomial", "beta"}}}},
            {"initial_conditions", {{"y(0)", y0}}}};
  return j.dump();
}

// D^beta (t^nu y') = t^(nu-1) y
inline std::string wright(double beta, double nu, double y0 = 1.0) {
  json j = {{"parameters", {{"beta", beta}, {"nu", nu}}},
            {"terms",
             {{{"coeff", 1},
               {"ops",
                {{{"derivative", {{"kind", "classical"}, {"order", 1}}}},
                 {{"monomial", "nu"}},
                 {{"derivative", {{"kind", "caputo"}, {"order", "beta"}}}}}}},
              {{"coeff", -1}, {"monomial", "nu-1"}}}},
            {"initial_conditions", {{"y(0)", y0}}}};
  return j.dump();
}

// t^gamma y'' + T_alpha y + y = 0 with gamma given as an expression
inline std::string three_term(double alpha, const std::string& gamma, const json& extra_parameters, double c0,
                              double c1) {
  json params = {{"alpha", alpha}};
  if (extra_parameters.is_object()) params.update(extra_parameters);
  json j = {{"parameters", params},
            {"terms",
             {{{"coeff", 1}, {"monomial", gamma}, {"derivative", {{"kind", "classical"}, {"order", 2}}}},
              {{"coeff", 1}, {"derivative", {{"kind", "conformable"}, {"order", "alpha"}}}},
              {{"coeff", 1}}}},
            {"initial_conditions", {{"y(0)", c0}, {"y'(0)", c1}}}};
  return j.dump();
}

// D^(1-alpha) y = y' with lim D^(1-alpha) y = 0 at the origin
inline std::string riemann_liouville(double alpha, double b0 = 1.0) {
  json j = {{"parameters", {{"alpha", alpha}}},
            {"terms",
             {{{"coeff", 1}, {"derivative", {{"kind", "riemann-liouville"}, {"order", "1-alpha"}}}},
              {{"coeff", -1}, {"derivative", {{"kind", "classical"}, {"order", 1}}}}}},
            {"initial_conditions", {{"y(0)", b0}}},
            {"auxiliary", {{{"description", "lim D^(1-alpha) y = 0"}, {"index", {{"1", 1}}}, {"sweep", "1"}, {"value", 0}}}}};
  return j.dump();
}

}  // namespace examples

inline fracss::Problem problem_from(const std::string& json_text) { return fracss::parse_problem(json_text); }

inline fracss::SolutionReport solve_text(const std::string& json_text, int max_index = 64) {
  fracss::SolveOptions opt;
  opt.max_index = max_index;
  return fracss::solve(problem_from(json_text).equation, opt);
}
