#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracss/series.hpp"

namespace fracss {

/// coeff · (ops applied to y, first step innermost).  A term with an empty
/// operator list is the plain coeff·y(t).
struct EquationTerm {
  double coeff = 1.0;
  std::vector<OperatorStep> ops;

  /// coeff · t^monomial · D(y), the common single-operator shape.
  static EquationTerm make(double coeff, LinearForm monomial = {},
                           std::optional<DerivativeDescriptor> derivative = std::nullopt);

  bool has_derivative() const;
  std::string str() const;
};

/// Extra seed condition: fixes the coefficient at `index` (generator name ->
/// count, missing names are 0).  With `sweep` set, the condition covers every
/// index reached by increasing that generator's count.
struct AuxiliaryCondition {
  std::string description;
  std::map<std::string, long long> index;
  std::optional<std::string> sweep;
  double value = 0.0;
};

/// Linear homogeneous equation Σ terms = 0 with initial conditions
/// y^{(k)}(0) = value.
struct EquationSpec {
  ParameterValues parameters;
  std::vector<EquationTerm> terms;
  std::map<int, double> initial_conditions;
  std::vector<AuxiliaryCondition> auxiliary;

  /// Throws InvalidArgument on: no terms, no derivative, zero coefficients,
  /// negative initial-condition orders.
  void validate() const;
  int max_initial_order() const;
};

}  // namespace fracss
