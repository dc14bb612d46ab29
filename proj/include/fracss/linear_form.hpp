#pragma once

#include <map>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace fracss {

using Rational = boost::rational<long long>;
using ParameterValues = std::map<std::string, double>;

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Affine expression over named parameters with exact rational coefficients,
/// e.g. "2-alpha" or "nu-1". Zero coefficients are never stored.
class LinearForm {
 public:
  LinearForm() = default;
  LinearForm(Rational constant) : constant_(constant) {}  // NOLINT(implicit)
  static LinearForm parameter(const std::string& name, Rational coeff = 1);

  /// Parses sums of `c`, `p`, `c*p`, `p*c`, `p/c` terms with parentheses.
  /// Decimal literals are converted to exact rationals.
  static LinearForm parse(std::string_view text);

  const std::map<std::string, Rational>& coefficients() const { return coeffs_; }
  Rational constant() const { return constant_; }
  Rational coefficient(const std::string& name) const;
  bool is_constant() const { return coeffs_.empty(); }

  double evaluate(const ParameterValues& values) const;
  std::string str() const;

  LinearForm& operator+=(const LinearForm& other);
  LinearForm& operator-=(const LinearForm& other);
  LinearForm& operator*=(Rational scale);

  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(Rational s, LinearForm a) { return a *= s; }
  friend LinearForm operator-(LinearForm a) { return a *= Rational(-1); }
  friend bool operator==(const LinearForm& a, const LinearForm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }

 private:
  std::map<std::string, Rational> coeffs_;
  Rational constant_{0};
};

/// Exact rational from a decimal literal such as "0.25", "3", "-1.5e-2".
Rational parse_rational(std::string_view text);

}  // namespace fracss
