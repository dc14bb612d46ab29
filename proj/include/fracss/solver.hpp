#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracss/equation.hpp"
#include "fracss/series.hpp"
#include "fracss/special_functions.hpp"

namespace fracss {

/// Smallest lattice on which every term of `eq` maps the ansatz onto itself.
/// Generators: parameters of derivative orders (term order), then parameters
/// of monomials, then the classical unit if any integer exponent step or a
/// derivative initial condition needs it.
ExponentLattice build_lattice(const EquationSpec& eq);

/// One resolved summand of a grouped term.
struct Contribution {
  double coeff = 1.0;
  std::vector<LatticeOp> ops;
  std::string label;
};

/// Terms with identical exponent shift, merged.  `delta` is the offset of this
/// term's unknown from the relation anchor: c_{q+delta}.
struct RelationTerm {
  Exponent shift;
  MultiIndex delta;
  std::vector<Contribution> contributions;
};

/// The balance at output exponent e(q) + anchor restricted to the index region
/// where exactly the terms in `present` reach a non-negative index.
struct BalanceRelation {
  std::vector<std::size_t> present;
  MultiIndex lower;
  bool boundary = false;
};

struct RowEntry {
  MultiIndex index;
  std::size_t term = 0;
  LogValue factor;
};

/// A relation instantiated at a concrete anchor q.
struct RelationRow {
  MultiIndex anchor;
  Exponent exponent;
  std::vector<RowEntry> entries;
};

/// Outcome of boundary zero propagation on a finite index box.
struct ZeroAnalysis {
  bool done = false;
  int max_index = 0;
  MultiIndex box;    // inclusive upper corner of the analysed box
  MultiIndex inner;  // unknowns up to here have every relation fully inside the box
  std::size_t forced_zero_count = 0;
  std::size_t surviving_count = 0;
  /// Unknowns inside `inner` that are not forced to zero, in index order;
  /// left incomplete past kSurvivorCap entries.
  std::vector<MultiIndex> surviving;
  bool surviving_complete = true;
  static constexpr std::size_t kSurvivorCap = 100000;
  /// Some relation couples three or more surviving unknowns.
  bool coupled = false;
  std::vector<RelationRow> coupled_examples;
};

class RecurrenceSystem {
 public:
  ExponentLattice lattice;
  std::vector<RelationTerm> terms;
  Exponent anchor;
  std::vector<BalanceRelation> relations;
  ZeroAnalysis zeros;

  Exponent output_exponent(const MultiIndex& q) const;
  /// Row at anchor q, or nullopt when no term reaches a non-negative index.
  /// Entries with a zero factor are dropped.
  std::optional<RelationRow> instantiate(const MultiIndex& q) const;
  LogValue term_factor(std::size_t term, const MultiIndex& unknown) const;
  /// Human-readable relation, e.g. "c[i+1,j]*(...) + c[i,j] = 0  (i >= 0, j >= 0)".
  std::string describe(const BalanceRelation& relation) const;
  std::vector<std::string> describe_all() const;
  /// Every index a relation can touch has coordinates >= this.
  MultiIndex min_anchor() const;
};

RecurrenceSystem derive_balance(const EquationSpec& eq, const ExponentLattice& lattice);

/// Marks coefficients forced to zero by relations with a single surviving
/// unknown, on a box sized for chains of `max_index` steps.
RecurrenceSystem propagate_zeros(const RecurrenceSystem& system, int max_index = 64);

enum class SeedSource { InitialCondition, Auxiliary, User };
std::string to_string(SeedSource source);

struct FreeCoefficient {
  MultiIndex index;
  double value = 0.0;
  SeedSource source = SeedSource::InitialCondition;
  std::string description;
};

/// Coefficients reached from one seed by two-term relations.
struct Chain {
  MultiIndex seed;
  MultiIndex step;
  std::vector<MultiIndex> members;
  /// (leading term, trailing term) of each link; empty when the chain branches.
  std::vector<std::pair<std::size_t, std::size_t>> links;
  bool uniform = true;
};

enum class ClosedFormFamily { MittagLeffler, KilbasSaigo, Wright };
std::string to_string(ClosedFormFamily family);

/// prefactor · t^power · F(scale · t^argument).
struct ClosedFormComponent {
  ClosedFormFamily family = ClosedFormFamily::MittagLeffler;
  std::vector<double> params;
  double prefactor = 1.0;
  Exponent power;
  double scale = 1.0;
  Exponent argument;
};

class ClosedForm {
 public:
  ExponentLattice lattice;
  std::vector<ClosedFormComponent> components;

  /// Family name, or "linear-combination" for several components.
  std::string kind() const;
  double evaluate(double t, SeriesOptions opt = {}) const;
  std::string str() const;
};

enum class SolveStatus { Solved, RecurrenceOnly };

struct SolveOptions {
  int max_index = 64;
  /// Extra seed values by lattice index.
  std::map<MultiIndex, double> seeds;
};

struct SolutionReport {
  SolveStatus status = SolveStatus::Solved;
  Series series;
  RecurrenceSystem recurrence;
  std::vector<FreeCoefficient> free_coefficients;
  std::vector<Chain> chains;
  std::optional<ClosedForm> closed_form;
  std::vector<std::string> warnings;
  int max_index = 0;

  /// "recurrence-only", "unrecognized", or the closed-form kind.
  std::string label() const;
};

/// Fills seeds from the conditions and runs the two-term relations forward.
/// Throws SolveError on missing or conflicting seed values.  A coupled system
/// yields status RecurrenceOnly with an empty series.
SolutionReport solve_chains(const RecurrenceSystem& system, const EquationSpec& eq, const SolveOptions& opt = {});

/// Matches each non-zero chain against the special-function families.
std::optional<ClosedForm> recognize_closed_form(const SolutionReport& report);

/// build_lattice, derive_balance, propagate_zeros, solve_chains and
/// recognize_closed_form in sequence.
SolutionReport solve(const EquationSpec& eq, const SolveOptions& opt = {});

}  // namespace fracss
