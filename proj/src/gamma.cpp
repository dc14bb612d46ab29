#include "fracss/gamma.hpp"

#include <algorithm>
#include <limits>
#include <math.h>

#include "fracss/errors.hpp"

namespace fracss {

LogValue LogValue::from(double x) {
  if (x == 0.0) return {};
  return {x > 0 ? 1 : -1, std::log(std::abs(x))};
}

LogValue operator/(LogValue a, LogValue b) {
  if (b.sign == 0) throw DomainError("division by zero in log-magnitude arithmetic");
  if (a.sign == 0) return {};
  return {a.sign * b.sign, a.log_abs - b.log_abs};
}

LogValue log_sum(std::span<const LogValue> terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.sign != 0) peak = std::max(peak, t.log_abs);
  }
  if (!std::isfinite(peak)) return {};
  CompensatedSum acc;
  for (const auto& t : terms) {
    if (t.sign != 0) acc.add(t.sign * std::exp(t.log_abs - peak));
  }
  double s = acc.value();
  if (s == 0.0) return {};
  return {s > 0 ? 1 : -1, peak + std::log(std::abs(s))};
}

bool is_gamma_pole(double x) {
  if (x > 0.0) return false;
  double r = std::nearbyint(x);
  return std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x));
}

double log_abs_gamma(double x, int* sign) {
  int s = 1;
#if defined(__GLIBC__)
  double v = ::lgamma_r(x, &s);
#else
  double v = std::lgamma(x);
  if (x < 0.0) s = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
#endif
  if (sign != nullptr) *sign = s;
  return v;
}

LogValue gamma_ratio(double num, double den) {
  bool num_pole = is_gamma_pole(num);
  bool den_pole = is_gamma_pole(den);
  if (num_pole && !den_pole) {
    throw DomainError("gamma ratio has a pole in the numerator at " + std::to_string(num));
  }
  if (den_pole && !num_pole) return LogValue::zero();
  if (num_pole && den_pole) {
    // Γ(-a+ε)/Γ(-b+ε) -> (-1)^(a-b) b!/a!
    long long a = -static_cast<long long>(std::nearbyint(num));
    long long b = -static_cast<long long>(std::nearbyint(den));
    int sign = ((a - b) % 2 == 0) ? 1 : -1;
    return {sign, std::lgamma(static_cast<double>(b) + 1.0) - std::lgamma(static_cast<double>(a) + 1.0)};
  }
  int sn = 1;
  int sd = 1;
  double ln = log_abs_gamma(num, &sn);
  double ld = log_abs_gamma(den, &sd);
  return {sn * sd, ln - ld};
}

double rgamma(double x) {
  if (is_gamma_pole(x)) return 0.0;
  if (x > 0.0 && x < 171.0) return 1.0 / std::tgamma(x);
  int s = 1;
  double l = log_abs_gamma(x, &s);
  return s * std::exp(-l);
}

}  // namespace fracss
