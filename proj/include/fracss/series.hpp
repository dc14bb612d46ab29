#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracss/gamma.hpp"
#include "fracss/lattice.hpp"

namespace fracss {

enum class DerivativeKind { Caputo, RiemannLiouville, Conformable, Classical };

std::string to_string(DerivativeKind kind);
DerivativeKind parse_derivative_kind(const std::string& text);

/// Derivative kind plus order.  The order is kept both symbolically (so the
/// lattice can decide exponent identity) and numerically.  Order ranges:
/// caputo non-integer > 0, riemann-liouville and conformable in (0,1),
/// classical a positive integer.
class DerivativeDescriptor {
 public:
  DerivativeDescriptor(DerivativeKind kind, LinearForm order, const ParameterValues& values);
  /// Numeric-only order; the lattice resolves it by value.
  DerivativeDescriptor(DerivativeKind kind, double order);

  static DerivativeDescriptor classical(int n) { return {DerivativeKind::Classical, static_cast<double>(n)}; }

  DerivativeKind kind() const { return kind_; }
  double order() const { return value_; }
  const std::optional<LinearForm>& symbolic_order() const { return form_; }
  int classical_order() const { return static_cast<int>(value_); }
  /// ⌈order⌉ for Caputo, 1 for the (0,1) kinds, n for classical.
  int ceiling() const;

  std::string str() const;

 private:
  void validate() const;

  DerivativeKind kind_;
  std::optional<LinearForm> form_;
  double value_;
};

/// Multiplication by t^γ.
struct MonomialStep {
  LinearForm exponent;
};

using OperatorStep = std::variant<MonomialStep, DerivativeDescriptor>;

/// An operator resolved onto a lattice.  `shift` is the exponent change it
/// produces on every power term.
struct LatticeOp {
  enum class Kind { Monomial, Caputo, RiemannLiouville, Conformable, Classical };
  Kind kind = Kind::Monomial;
  Exponent shift;
  double order = 0.0;
  int ceiling = 0;
  std::string label;
};

LatticeOp resolve(const ExponentLattice& lattice, const OperatorStep& step);
LatticeOp monomial_op(const ExponentLattice& lattice, const Exponent& gamma);
LatticeOp derivative_op(const ExponentLattice& lattice, DerivativeKind kind, const Exponent& order);

/// Image of c·t^p under an operator: factor·c·t^{exponent}.
struct PowerImage {
  LogValue factor;
  Exponent exponent;
};

PowerImage apply_power(const ExponentLattice& lattice, const LatticeOp& op, const Exponent& p);

/// Truncated generalized fractional power series: finite map from exponent to
/// non-zero real coefficient over a fixed lattice.
class Series {
 public:
  Series() = default;
  explicit Series(ExponentLattice lattice) : lattice_(std::move(lattice)) {}

  const ExponentLattice& lattice() const { return lattice_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  double coefficient(const Exponent& e) const;

  /// Adds c to the coefficient of t^e (normalized); exact zeros are dropped.
  Series& add(const Exponent& e, double c);
  Series& add(const MultiIndex& index, double c) { return add(lattice_.at(index), c); }

  Series& operator+=(const Series& other);
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator*(double s, const Series& a);

 private:
  ExponentLattice lattice_;
  std::map<Exponent, double> terms_;
};

Series apply(const Series& s, const LatticeOp& op);
Series apply(const Series& s, const OperatorStep& step);

Series apply_caputo(const Series& s, const Exponent& alpha);
Series apply_caputo(const Series& s, double alpha);
Series apply_riemann_liouville(const Series& s, const Exponent& order);
Series apply_riemann_liouville(const Series& s, double order);
Series apply_conformable(const Series& s, const Exponent& alpha);
Series apply_conformable(const Series& s, double alpha);
Series apply_classical(const Series& s, int n);
Series multiply_monomial(const Series& s, const Exponent& gamma);
Series apply_conformable_integral(const Series& s, const Exponent& alpha);
Series apply_conformable_integral(const Series& s, double alpha);

/// Σ c·t^{value(e)} in ascending exponent order with compensated summation.
double evaluate(const Series& s, double t);
double evaluate(const Series& s, double t, const ParameterValues& generator_values);

/// Pairs of symbolically distinct exponents whose values agree within tol
/// (e.g. rational generator values).  Evaluation merges them; balance
/// derivation does not.
std::vector<std::pair<Exponent, Exponent>> numeric_collisions(const Series& s, double tol = 1e-12);

}  // namespace fracss
