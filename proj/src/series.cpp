#include "fracss/series.hpp"

#include <algorithm>
#include <cmath>

#include "fracss/errors.hpp"

namespace fracss {

std::string to_string(DerivativeKind kind) {
  switch (kind) {
    case DerivativeKind::Caputo:
      return "caputo";
    case DerivativeKind::RiemannLiouville:
      return "riemann-liouville";
    case DerivativeKind::Conformable:
      return "conformable";
    case DerivativeKind::Classical:
      return "classical";
  }
  return "?";
}

DerivativeKind parse_derivative_kind(const std::string& text) {
  if (text == "caputo") return DerivativeKind::Caputo;
  if (text == "riemann-liouville" || text == "rl") return DerivativeKind::RiemannLiouville;
  if (text == "conformable") return DerivativeKind::Conformable;
  if (text == "classical") return DerivativeKind::Classical;
  throw InvalidArgument("unknown derivative kind '" + text + "'");
}

DerivativeDescriptor::DerivativeDescriptor(DerivativeKind kind, LinearForm order, const ParameterValues& values)
    : kind_(kind), form_(std::move(order)), value_(form_->evaluate(values)) {
  validate();
}

DerivativeDescriptor::DerivativeDescriptor(DerivativeKind kind, double order) : kind_(kind), value_(order) {
  validate();
}

void DerivativeDescriptor::validate() const {
  auto fail = [this](const std::string& why) {
    throw InvalidArgument(to_string(kind_) + " derivative order " + std::to_string(value_) + ": " + why);
  };
  if (!std::isfinite(value_)) fail("must be finite");
  bool integral = std::abs(value_ - std::nearbyint(value_)) < 1e-12;
  switch (kind_) {
    case DerivativeKind::Caputo:
      if (value_ <= 0.0 || integral) fail("must be positive and non-integer");
      break;
    case DerivativeKind::RiemannLiouville:
    case DerivativeKind::Conformable:
      if (value_ <= 0.0 || value_ >= 1.0) fail("must lie in (0,1)");
      break;
    case DerivativeKind::Classical:
      if (!integral || value_ < 1.0) fail("must be a positive integer");
      if (form_ && !form_->is_constant()) fail("must be a constant");
      break;
  }
}

int DerivativeDescriptor::ceiling() const {
  switch (kind_) {
    case DerivativeKind::Caputo:
      return static_cast<int>(std::ceil(value_));
    case DerivativeKind::Classical:
      return classical_order();
    default:
      return 1;
  }
}

std::string DerivativeDescriptor::str() const {
  std::string order = form_ ? form_->str() : std::to_string(value_);
  switch (kind_) {
    case DerivativeKind::Caputo:
      return "D^{" + order + "}";
    case DerivativeKind::RiemannLiouville:
      return "RL^{" + order + "}";
    case DerivativeKind::Conformable:
      return "T_{" + order + "}";
    case DerivativeKind::Classical:
      return "d^" + std::to_string(classical_order()) + "/dt^" + std::to_string(classical_order());
  }
  return "?";
}

LatticeOp monomial_op(const ExponentLattice& lattice, const Exponent& gamma) {
  LatticeOp op;
  op.kind = LatticeOp::Kind::Monomial;
  op.shift = lattice.normalize(gamma);
  op.label = "t^{" + lattice.format(op.shift) + "}";
  return op;
}

LatticeOp derivative_op(const ExponentLattice& lattice, DerivativeKind kind, const Exponent& order) {
  LatticeOp op;
  op.order = lattice.value(order);
  op.shift = lattice.normalize(-order);
  DerivativeDescriptor check(kind, op.order);
  op.ceiling = check.ceiling();
  switch (kind) {
    case DerivativeKind::Caputo:
      op.kind = LatticeOp::Kind::Caputo;
      op.label = "D^{" + lattice.format(order) + "}";
      break;
    case DerivativeKind::RiemannLiouville:
      op.kind = LatticeOp::Kind::RiemannLiouville;
      op.label = "RL^{" + lattice.format(order) + "}";
      break;
    case DerivativeKind::Conformable:
      op.kind = LatticeOp::Kind::Conformable;
      op.label = "T_{" + lattice.format(order) + "}";
      break;
    case DerivativeKind::Classical:
      op.kind = LatticeOp::Kind::Classical;
      op.label = "d^" + std::to_string(op.ceiling);
      break;
  }
  return op;
}

LatticeOp resolve(const ExponentLattice& lattice, const OperatorStep& step) {
  if (const auto* mono = std::get_if<MonomialStep>(&step)) {
    auto gamma = lattice.express(mono->exponent);
    if (!gamma) throw LatticeError("monomial t^{" + mono->exponent.str() + "} is not on the exponent lattice");
    return monomial_op(lattice, *gamma);
  }
  const auto& d = std::get<DerivativeDescriptor>(step);
  std::optional<Exponent> order;
  if (d.kind() == DerivativeKind::Classical) {
    order = lattice.express(LinearForm(Rational(d.classical_order())));
  } else if (d.symbolic_order()) {
    order = lattice.express(*d.symbolic_order());
  } else {
    order = lattice.express_value(d.order());
  }
  if (!order) throw LatticeError("derivative order of " + d.str() + " is not on the exponent lattice");
  return derivative_op(lattice, d.kind(), *order);
}

namespace {

bool is_small_nonnegative_integer(const ExponentLattice& lattice, const Exponent& p, double pv, int below) {
  if (!lattice.is_integer(p)) return false;
  return pv > -0.5 && pv < below - 0.5;
}

}  // namespace

PowerImage apply_power(const ExponentLattice& lattice, const LatticeOp& op, const Exponent& p) {
  PowerImage image{LogValue::one(), lattice.normalize(p + op.shift)};
  double pv = lattice.value(p);
  switch (op.kind) {
    case LatticeOp::Kind::Monomial:
      break;
    case LatticeOp::Kind::Caputo: {
      int n = op.ceiling;
      if (is_small_nonnegative_integer(lattice, p, pv, n)) {
        image.factor = LogValue::zero();
      } else if (pv > n - 1 + 1e-12) {
        image.factor = gamma_ratio(pv + 1.0, pv - op.order + 1.0);
      } else {
        throw DomainError("Caputo power rule undefined for this exponent: t^{" + lattice.format(p) +
                          "} under order " + std::to_string(op.order));
      }
      break;
    }
    case LatticeOp::Kind::RiemannLiouville:
      image.factor = gamma_ratio(pv + 1.0, pv + 1.0 - op.order);
      break;
    case LatticeOp::Kind::Conformable:
      image.factor = (lattice.is_integer(p) && p == lattice.zero()) ? LogValue::zero() : LogValue::from(pv);
      break;
    case LatticeOp::Kind::Classical: {
      int n = op.ceiling;
      if (is_small_nonnegative_integer(lattice, p, pv, n)) {
        image.factor = LogValue::zero();
        break;
      }
      // falling factorial p(p-1)...(p-n+1) = Γ(p+1)/Γ(p-n+1)
      for (int k = 0; k < n; ++k) image.factor = image.factor * LogValue::from(pv - k);
      break;
    }
  }
  return image;
}

double Series::coefficient(const Exponent& e) const {
  auto it = terms_.find(lattice_.normalize(e));
  return it == terms_.end() ? 0.0 : it->second;
}

Series& Series::add(const Exponent& e, double c) {
  if (e.index.size() != lattice_.rank()) throw LatticeError("term exponent rank does not match lattice");
  if (c == 0.0) return *this;
  Exponent key = lattice_.normalize(e);
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
  return *this;
}

Series& Series::operator+=(const Series& other) {
  if (!(lattice_ == other.lattice_)) throw LatticeError("cannot add series on different lattices");
  for (const auto& [e, c] : other.terms_) add(e, c);
  return *this;
}

Series operator*(double s, const Series& a) {
  Series out(a.lattice_);
  for (const auto& [e, c] : a.terms_) out.add(e, s * c);
  return out;
}

Series apply(const Series& s, const LatticeOp& op) {
  Series out(s.lattice());
  for (const auto& [e, c] : s.terms()) {
    PowerImage image = apply_power(s.lattice(), op, e);
    if (image.factor.is_zero()) continue;
    out.add(image.exponent, c * image.factor.value());
  }
  return out;
}

Series apply(const Series& s, const OperatorStep& step) { return apply(s, resolve(s.lattice(), step)); }

namespace {

Exponent order_on_lattice(const ExponentLattice& lattice, double order) {
  auto e = lattice.express_value(order);
  if (!e) throw LatticeError("order " + std::to_string(order) + " is not on the exponent lattice");
  return *e;
}

}  // namespace

Series apply_caputo(const Series& s, const Exponent& alpha) {
  return apply(s, derivative_op(s.lattice(), DerivativeKind::Caputo, alpha));
}
Series apply_caputo(const Series& s, double alpha) {
  return apply_caputo(s, order_on_lattice(s.lattice(), alpha));
}
Series apply_riemann_liouville(const Series& s, const Exponent& order) {
  return apply(s, derivative_op(s.lattice(), DerivativeKind::RiemannLiouville, order));
}
Series apply_riemann_liouville(const Series& s, double order) {
  return apply_riemann_liouville(s, order_on_lattice(s.lattice(), order));
}
Series apply_conformable(const Series& s, const Exponent& alpha) {
  return apply(s, derivative_op(s.lattice(), DerivativeKind::Conformable, alpha));
}
Series apply_conformable(const Series& s, double alpha) {
  return apply_conformable(s, order_on_lattice(s.lattice(), alpha));
}
Series apply_classical(const Series& s, int n) {
  Exponent order = s.lattice().normalize(Exponent{MultiIndex(s.lattice().rank(), 0), Rational(n)});
  return apply(s, derivative_op(s.lattice(), DerivativeKind::Classical, order));
}
Series multiply_monomial(const Series& s, const Exponent& gamma) { return apply(s, monomial_op(s.lattice(), gamma)); }

Series apply_conformable_integral(const Series& s, const Exponent& alpha) {
  const auto& lattice = s.lattice();
  if (!(lattice.value(alpha) > 0.0 && lattice.value(alpha) < 1.0)) {
    throw InvalidArgument("conformable integral order must lie in (0,1)");
  }
  Series out(lattice);
  for (const auto& [e, c] : s.terms()) {
    Exponent raised = lattice.normalize(e + alpha);
    if (raised == lattice.zero()) throw DomainError("conformable integral undefined for t^{-alpha}");
    out.add(raised, c / lattice.value(raised));
  }
  return out;
}
Series apply_conformable_integral(const Series& s, double alpha) {
  return apply_conformable_integral(s, order_on_lattice(s.lattice(), alpha));
}

namespace {

double evaluate_on(const ExponentLattice& lattice, const Series& s, double t) {
  if (!(t >= 0.0)) throw DomainError("series evaluation requires t >= 0");
  std::vector<std::pair<double, double>> powers;
  powers.reserve(s.size());
  for (const auto& [e, c] : s.terms()) powers.emplace_back(lattice.value(e), c);
  std::sort(powers.begin(), powers.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  CompensatedSum acc;
  for (const auto& [p, c] : powers) {
    if (t == 0.0) {
      if (p < 0.0) throw DomainError("negative power evaluated at t = 0");
      if (p == 0.0) acc.add(c);
      continue;
    }
    acc.add(c * std::pow(t, p));
  }
  return acc.value();
}

}  // namespace

double evaluate(const Series& s, double t) { return evaluate_on(s.lattice(), s, t); }

double evaluate(const Series& s, double t, const ParameterValues& generator_values) {
  return evaluate_on(s.lattice().with_values(generator_values), s, t);
}

std::vector<std::pair<Exponent, Exponent>> numeric_collisions(const Series& s, double tol) {
  std::vector<std::pair<double, Exponent>> values;
  for (const auto& [e, c] : s.terms()) values.emplace_back(s.lattice().value(e), e);
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Exponent, Exponent>> out;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (std::abs(values[k].first - values[k - 1].first) <= tol * std::max(1.0, std::abs(values[k].first))) {
      out.emplace_back(values[k - 1].second, values[k].second);
    }
  }
  return out;
}

}  // namespace fracss
