#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fracss/equation.hpp"
#include "fracss/solver.hpp"

namespace fracss {

/// Coefficient-matching equations for the ansatz truncated to indices <= N on
/// every axis.  Balance rows are keyed by the output exponent; rows that would
/// need an unknown beyond the truncation are dropped.
struct TruncatedSystem {
  ExponentLattice lattice;
  int N = 0;
  std::vector<MultiIndex> unknowns;
  std::map<MultiIndex, std::size_t> column;
  /// Dense rows; the first `balance_rows` are balance equations.
  std::vector<std::vector<double>> matrix;
  std::vector<double> rhs;
  std::vector<Exponent> row_exponents;
  std::size_t balance_rows = 0;

  /// Index of the balance row at this output exponent, or -1.
  long long row_of(const Exponent& e) const;
};

TruncatedSystem build_truncated_system(const EquationSpec& eq, const ExponentLattice& lattice, int N);

/// Least-squares solution of the truncated system.  Throws SolveError naming
/// the undetermined indices when the system is rank deficient at the given
/// parameters and at the parameters scaled by 1 ± 1e-6; in the latter case the
/// mean of the two nearby solutions is returned.
std::map<MultiIndex, double> brute_force_coefficients(const EquationSpec& eq, const ExponentLattice& lattice, int N);
std::map<MultiIndex, double> solve_truncated(const TruncatedSystem& sys);

struct RelationCheck {
  std::size_t rows_compared = 0;
  /// Largest entry difference, relative to the largest entry of the row.
  double max_deviation = 0.0;
  std::vector<std::string> mismatches;
};

/// Instantiates the recurrence at every anchor with coordinates up to
/// `max_anchor` whose unknowns all lie inside the truncation and compares each
/// row with the balance row of `truncated` at the same output exponent.
RelationCheck compare_relations(const RecurrenceSystem& sys, const TruncatedSystem& truncated, long long max_anchor,
                                double rtol = 1e-12);

/// Largest |a - b| / max(|b|, floor) over indices present in `reference`;
/// coefficients missing from `series` count as zero.  A negative floor means
/// 1e-14 times the largest reference magnitude, which absorbs round-off in
/// coefficients that are exactly zero.
double max_relative_deviation(const std::map<MultiIndex, double>& reference, const Series& series,
                              double floor = -1.0);

/// L1 approximation of the Caputo derivative of order alpha in (0,1) on the
/// grid t_n = n·h.  Element 0 is 0.
std::vector<double> caputo_l1(const std::vector<double>& samples, double alpha, double h);

enum class ResidualScheme { ExactSeries, L1 };
std::string to_string(ResidualScheme scheme);

struct ResidualReport {
  ResidualScheme scheme = ResidualScheme::ExactSeries;
  double h = 0.0;
  std::vector<double> points;
  std::vector<double> values;

  double max_abs() const;
};

/// Equation residual of the report's series at `points`.  ExactSeries applies
/// every operator to the truncated series; L1 replaces Caputo and
/// Riemann-Liouville operators with the L1 scheme on the grid of step h, so
/// every point must be a multiple of h.
ResidualReport residual(const EquationSpec& eq, const SolutionReport& rep, const std::vector<double>& points,
                        ResidualScheme scheme = ResidualScheme::ExactSeries, double h = 0.0);

}  // namespace fracss
