#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fracss/equation.hpp"
#include "fracss/solver.hpp"

namespace fracss {

struct ProblemOptions {
  int max_index = 64;
  double tol = 1e-14;
};

struct Problem {
  std::string name;
  EquationSpec equation;
  ProblemOptions options;
  nlohmann::json source;
};

/// Parses a JSON problem.  Syntax and validation failures throw ParseError
/// carrying the line of the offending value.
Problem parse_problem(const std::string& text);
Problem parse_problem(const nlohmann::json& doc);
Problem load_problem(const std::filesystem::path& path);

/// "y(0)", "y'(0)", "y''(0)", "y^(k)(0)" -> k, or nullopt.
std::optional<int> parse_initial_condition_key(const std::string& key);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Coefficient table: one column per generator, then offset and coefficient,
/// rows in ascending exponent value.
std::string coefficients_csv(const Series& series);

nlohmann::json report_to_json(const Problem& problem, const SolutionReport& report);

/// What `eval` needs back from a saved report.
struct SavedSolution {
  Problem problem;
  std::string status;
  Series series;
  std::optional<ClosedForm> closed_form;
};

bool is_report(const nlohmann::json& doc);
SavedSolution report_from_json(const nlohmann::json& doc);

nlohmann::json lattice_to_json(const ExponentLattice& lattice);
ExponentLattice lattice_from_json(const nlohmann::json& doc);

}  // namespace fracss
