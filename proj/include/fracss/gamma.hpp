#pragma once

#include <cmath>
#include <span>

namespace fracss {

/// Real number stored as sign and log-magnitude. sign == 0 is an exact zero.
struct LogValue {
  int sign = 0;
  double log_abs = 0.0;

  static LogValue zero() { return {}; }
  static LogValue one() { return {1, 0.0}; }
  static LogValue from(double x);

  bool is_zero() const { return sign == 0; }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.log_abs + b.log_abs};
  }
  friend LogValue operator/(LogValue a, LogValue b);
  friend LogValue operator-(LogValue a) { return {-a.sign, a.log_abs}; }
};

/// Sum of signed log-magnitude values, shifted by the largest magnitude.
LogValue log_sum(std::span<const LogValue> terms);

/// True when x is (numerically) a pole of the gamma function.
bool is_gamma_pole(double x);

/// Thread-safe log|Γ(x)| and the sign of Γ(x); x must not be a pole.
double log_abs_gamma(double x, int* sign = nullptr);

/// Γ(num)/Γ(den) via log-gamma.  Denominator pole with finite numerator gives
/// an exact zero; a numerator pole alone throws DomainError; both poles give
/// the finite limit of the ratio.
LogValue gamma_ratio(double num, double den);

/// 1/Γ(x) with 1/Γ(-n) = 0.
double rgamma(double x);

/// Neumaier's variant of Kahan compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace fracss
