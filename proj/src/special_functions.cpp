#include "fracss/special_functions.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fracss/errors.hpp"
#include "fracss/gamma.hpp"

namespace fracss {

namespace {

// Ascending-k compensated summation.  `decaying(k)` tells whether term
// magnitudes are already monotonically decreasing at k.
SeriesResult sum_terms(const std::function<double(int)>& term, const std::function<bool(int)>& decaying,
                       const SeriesOptions& opt, const char* name) {
  if (!(opt.tol > 0.0)) throw InvalidArgument(std::string(name) + ": tol must be positive");
  if (opt.max_terms < 1) throw InvalidArgument(std::string(name) + ": max_terms must be positive");
  CompensatedSum acc;
  double abs_total = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double last_nonzero = 0.0;
  double before_last_nonzero = 0.0;
  for (int k = 0; k < opt.max_terms; ++k) {
    double t = term(k);
    if (!std::isfinite(t)) {
      throw TruncationError(std::string(name) + ": non-finite term at k = " + std::to_string(k), t);
    }
    acc.add(t);
    abs_total += std::abs(t);
    if (t != 0.0) {
      before_last_nonzero = last_nonzero;
      last_nonzero = t;
    }
    double threshold = opt.tol * std::max(1.0, std::abs(acc.value()));
    if (decaying(k) && std::abs(t) <= threshold && std::abs(prev) <= threshold) {
      SeriesResult r;
      r.value = acc.value();
      r.terms = k + 1;
      r.last_term = std::abs(last_nonzero);
      double ratio = before_last_nonzero != 0.0 ? std::abs(last_nonzero / before_last_nonzero) : 0.0;
      double geometric = ratio < 1.0 ? r.last_term * ratio / (1.0 - ratio) : r.last_term * opt.max_terms;
      r.tail_bound = geometric + 4.0 * std::numeric_limits<double>::epsilon() * abs_total;
      return r;
    }
    prev = t;
  }
  throw TruncationError(std::string(name) + ": no convergence within " + std::to_string(opt.max_terms) +
                            " terms (last term magnitude " + std::to_string(std::abs(prev)) + ")",
                        std::abs(prev));
}

// z^k / Γ(x) with reciprocal-gamma convention at poles.
double power_over_gamma(double z, int k, double x) {
  if (is_gamma_pole(x)) return 0.0;
  if (z == 0.0) return k == 0 ? rgamma(x) : 0.0;
  double direct = std::pow(z, k);
  if (std::isfinite(direct) && direct != 0.0 && x < 171.0) return direct * rgamma(x);
  int s = 1;
  double lg = log_abs_gamma(x, &s);
  int zsign = (z < 0.0 && (k % 2 != 0)) ? -1 : 1;
  return zsign * s * std::exp(k * std::log(std::abs(z)) - lg);
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

MittagLefflerParams::MittagLefflerParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("Mittag-Leffler parameters must be positive");
}

KilbasSaigoParams::KilbasSaigoParams(double alpha, double m, double l) : alpha_(alpha), m_(m), l_(l) {
  if (!(alpha > 0.0) || !(m > 0.0) || !std::isfinite(l)) {
    throw InvalidArgument("Kilbas-Saigo parameters require alpha > 0, m > 0 and finite l");
  }
  for (int i = 0;; ++i) {
    double num = alpha * (i * m + l) + 1.0;
    double den = num + alpha;
    if (num > 0.0 && den > 0.0) break;
    if (is_gamma_pole(num) || is_gamma_pole(den)) {
      throw DomainError("Kilbas-Saigo product has a gamma pole at index i = " + std::to_string(i));
    }
  }
}

WrightParams::WrightParams(double lambda, double mu) : lambda_(lambda), mu_(mu) {
  if (!(lambda > -1.0) || !std::isfinite(mu)) throw InvalidArgument("Wright function requires lambda > -1");
}

GeneralizedWrightParams::GeneralizedWrightParams(std::vector<Pair> upper, std::vector<Pair> lower)
    : upper_(std::move(upper)), lower_(std::move(lower)) {
  for (const auto& [a, s] : upper_) {
    if (!(s > 0.0) || !std::isfinite(a)) throw InvalidArgument("generalized Wright upper scales must be positive");
  }
  for (const auto& [b, s] : lower_) {
    if (!(s > 0.0) || !std::isfinite(b)) throw InvalidArgument("generalized Wright lower scales must be positive");
  }
}

SeriesResult mittag_leffler_series(const MittagLefflerParams& p, double z, SeriesOptions opt) {
  const double a = p.alpha();
  const double b = p.beta();
  return sum_terms([&](int k) { return power_over_gamma(z, k, a * k + b); },
                   [&](int k) { return a * k + b > 2.0; }, opt, "mittag_leffler");
}

double kilbas_saigo_coefficient(const KilbasSaigoParams& p, int k) {
  double log_c = 0.0;
  int sign = 1;
  for (int i = 0; i < k; ++i) {
    double num = p.alpha() * (i * p.m() + p.l()) + 1.0;
    int sn = 1;
    int sd = 1;
    log_c += log_abs_gamma(num, &sn) - log_abs_gamma(num + p.alpha(), &sd);
    sign *= sn * sd;
  }
  return sign * std::exp(log_c);
}

SeriesResult kilbas_saigo_series(const KilbasSaigoParams& p, double z, SeriesOptions opt) {
  // running log-magnitude of the coefficient product
  double log_c = 0.0;
  int sign = 1;
  int next = 0;
  auto term = [&](int k) {
    if (k == 0) return 1.0;
    while (next < k) {
      double num = p.alpha() * (next * p.m() + p.l()) + 1.0;
      int sn = 1;
      int sd = 1;
      log_c += log_abs_gamma(num, &sn) - log_abs_gamma(num + p.alpha(), &sd);
      sign *= sn * sd;
      ++next;
    }
    if (z == 0.0) return 0.0;
    int zsign = (z < 0.0 && (k % 2 != 0)) ? -1 : 1;
    return zsign * sign * std::exp(log_c + k * std::log(std::abs(z)));
  };
  return sum_terms(term, [&](int k) { return p.alpha() * (k * p.m() + p.l()) + 1.0 > 2.0; }, opt, "kilbas_saigo");
}

SeriesResult wright_series(const WrightParams& p, double z, SeriesOptions opt) {
  auto term = [&](int k) {
    double x = p.lambda() * k + p.mu();
    if (is_gamma_pole(x)) return 0.0;
    if (z == 0.0) return k == 0 ? rgamma(x) : 0.0;
    int s = 1;
    double lg = log_abs_gamma(x, &s);
    int zsign = (z < 0.0 && (k % 2 != 0)) ? -1 : 1;
    return zsign * s * std::exp(k * std::log(std::abs(z)) - log_factorial(k) - lg);
  };
  auto decaying = [&](int k) {
    return k >= 2.0 * std::abs(z) + 2.0 && (p.lambda() <= 0.0 || p.lambda() * k + p.mu() > 2.0);
  };
  return sum_terms(term, decaying, opt, "wright");
}

SeriesResult generalized_wright_series(const GeneralizedWrightParams& p, double z, SeriesOptions opt) {
  auto term = [&](int k) {
    double log_t = -log_factorial(k);
    int sign = 1;
    for (const auto& [a, s] : p.upper()) {
      double x = a + s * k;
      if (is_gamma_pole(x)) {
        throw DomainError("generalized Wright numerator gamma pole at k = " + std::to_string(k));
      }
      int sg = 1;
      log_t += log_abs_gamma(x, &sg);
      sign *= sg;
    }
    for (const auto& [b, s] : p.lower()) {
      double x = b + s * k;
      if (is_gamma_pole(x)) return 0.0;
      int sg = 1;
      log_t -= log_abs_gamma(x, &sg);
      sign *= sg;
    }
    if (z == 0.0) return k == 0 ? sign * std::exp(log_t) : 0.0;
    int zsign = (z < 0.0 && (k % 2 != 0)) ? -1 : 1;
    return zsign * sign * std::exp(log_t + k * std::log(std::abs(z)));
  };
  auto decaying = [&](int k) {
    if (k < 2.0 * std::abs(z) + 2.0) return false;
    for (const auto& [a, s] : p.upper()) {
      if (a + s * k < 2.0) return false;
    }
    for (const auto& [b, s] : p.lower()) {
      if (b + s * k < 2.0) return false;
    }
    return true;
  };
  return sum_terms(term, decaying, opt, "generalized_wright");
}

}  // namespace fracss
