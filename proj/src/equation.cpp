#include "fracss/equation.hpp"

#include <cmath>
#include <sstream>

#include "fracss/errors.hpp"

namespace fracss {

EquationTerm EquationTerm::make(double coeff, LinearForm monomial, std::optional<DerivativeDescriptor> derivative) {
  EquationTerm term;
  term.coeff = coeff;
  if (derivative) term.ops.emplace_back(*derivative);
  if (!(monomial == LinearForm{})) term.ops.emplace_back(MonomialStep{std::move(monomial)});
  return term;
}

bool EquationTerm::has_derivative() const {
  for (const auto& op : ops) {
    if (std::holds_alternative<DerivativeDescriptor>(op)) return true;
  }
  return false;
}

std::string EquationTerm::str() const {
  std::ostringstream out;
  out << coeff;
  std::string inner = "y";
  for (const auto& op : ops) {
    if (const auto* m = std::get_if<MonomialStep>(&op)) {
      inner = "t^{" + m->exponent.str() + "}*" + inner;
    } else {
      inner = std::get<DerivativeDescriptor>(op).str() + "(" + inner + ")";
    }
  }
  out << "*" << inner;
  return out.str();
}

void EquationSpec::validate() const {
  if (terms.empty()) throw InvalidArgument("equation has no terms");
  bool any_derivative = false;
  for (const auto& term : terms) {
    if (term.coeff == 0.0 || !std::isfinite(term.coeff)) {
      throw InvalidArgument("equation term coefficients must be finite and non-zero");
    }
    any_derivative = any_derivative || term.has_derivative();
  }
  if (!any_derivative) throw InvalidArgument("equation must contain at least one derivative");
  for (const auto& [order, value] : initial_conditions) {
    if (order < 0) throw InvalidArgument("initial-condition orders must be non-negative");
    if (!std::isfinite(value)) throw InvalidArgument("initial-condition values must be finite");
  }
}

int EquationSpec::max_initial_order() const {
  int m = 0;
  for (const auto& [order, value] : initial_conditions) m = std::max(m, order);
  return m;
}

}  // namespace fracss
