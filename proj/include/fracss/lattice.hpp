#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fracss/linear_form.hpp"

namespace fracss {

using MultiIndex = std::vector<long long>;

std::string format_index(const MultiIndex& index);

enum class GeneratorKind { ClassicalUnit, Fractional };

/// One exponent generator.  A fractional generator stands for `scale * parameter`
/// and must have a positive non-integer value; the classical unit is exactly 1.
struct ExponentGenerator {
  std::string name;
  double value = 1.0;
  GeneratorKind kind = GeneratorKind::Fractional;
  std::string parameter;
  Rational scale{1};

  static ExponentGenerator unit();
  static ExponentGenerator fractional(const std::string& parameter, double parameter_value,
                                      Rational scale = 1);
};

/// Symbolic exponent: integer combination of lattice generators plus an exact
/// rational offset.  Indices may be negative for operator images; ansatz terms
/// always have non-negative indices and zero offset.
struct Exponent {
  MultiIndex index;
  Rational offset{0};

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.index == b.index && a.offset == b.offset;
  }
  friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.index != b.index) return a.index < b.index;
    return a.offset < b.offset;
  }
  friend Exponent operator+(const Exponent& a, const Exponent& b);
  friend Exponent operator-(const Exponent& a, const Exponent& b);
  Exponent operator-() const;
};

/// Ordered exponent generators.  Exponent identity is symbolic: two exponents
/// are equal only if their indices and offsets agree, i.e. fractional generator
/// values are treated as Q-linearly independent of each other and of 1.
class ExponentLattice {
 public:
  ExponentLattice() = default;
  explicit ExponentLattice(std::vector<ExponentGenerator> generators);

  const std::vector<ExponentGenerator>& generators() const { return generators_; }
  std::size_t rank() const { return generators_.size(); }
  std::optional<std::size_t> unit_axis() const { return unit_axis_; }
  std::optional<std::size_t> axis_of(const std::string& name) const;

  Exponent zero() const { return Exponent{MultiIndex(rank(), 0), 0}; }
  Exponent at(const MultiIndex& index) const;
  Exponent axis(std::size_t k, long long count = 1) const;

  /// Absorbs the integer part of the offset into the unit index when the
  /// lattice has a classical-unit generator.
  Exponent normalize(Exponent e) const;

  double value(const Exponent& e) const;
  double value(const MultiIndex& index) const;

  /// Symbolically an integer: no fractional generator contributes and the
  /// offset is integral.
  bool is_integer(const Exponent& e) const;

  /// Writes an affine parameter expression on the lattice, or nullopt when a
  /// parameter is not a generator or its coefficient is not an integer
  /// multiple of the generator scale.
  std::optional<Exponent> express(const LinearForm& form) const;

  /// Finds a generator (or integer / rational constant) with this value.
  std::optional<Exponent> express_value(double v) const;

  /// Copy of the lattice with generator values replaced by parameter values.
  ExponentLattice with_values(const ParameterValues& values) const;

  std::string format(const Exponent& e) const;
  /// Exponent written with symbolic index variables, e.g. "(i+1)*alpha + j".
  std::string format_symbolic(const MultiIndex& shift, const Exponent& extra) const;
  static std::string index_variable(std::size_t axis);

  friend bool operator==(const ExponentLattice& a, const ExponentLattice& b);

 private:
  std::vector<ExponentGenerator> generators_;
  std::optional<std::size_t> unit_axis_;
};

}  // namespace fracss
