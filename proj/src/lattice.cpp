#include "fracss/lattice.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "fracss/errors.hpp"

namespace fracss {

std::string format_index(const MultiIndex& index) {
  std::string out = "(";
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (k > 0) out += ",";
    out += std::to_string(index[k]);
  }
  return out + ")";
}

ExponentGenerator ExponentGenerator::unit() {
  return ExponentGenerator{"1", 1.0, GeneratorKind::ClassicalUnit, "", Rational(1)};
}

ExponentGenerator ExponentGenerator::fractional(const std::string& parameter, double parameter_value,
                                                Rational scale) {
  ExponentGenerator g;
  g.kind = GeneratorKind::Fractional;
  g.parameter = parameter;
  g.scale = scale;
  g.value = to_double(scale) * parameter_value;
  if (scale == Rational(1)) {
    g.name = parameter;
  } else if (scale == Rational(-1)) {
    g.name = "-" + parameter;
  } else {
    g.name = to_string(scale) + "*" + parameter;
  }
  return g;
}

Exponent operator+(const Exponent& a, const Exponent& b) {
  if (a.index.size() != b.index.size()) throw LatticeError("exponents live on different lattices");
  Exponent r = a;
  for (std::size_t k = 0; k < r.index.size(); ++k) r.index[k] += b.index[k];
  r.offset += b.offset;
  return r;
}

Exponent operator-(const Exponent& a, const Exponent& b) { return a + (-b); }

Exponent Exponent::operator-() const {
  Exponent r = *this;
  for (auto& v : r.index) v = -v;
  r.offset = -r.offset;
  return r;
}

ExponentLattice::ExponentLattice(std::vector<ExponentGenerator> generators)
    : generators_(std::move(generators)) {
  std::set<std::string> names;
  for (std::size_t k = 0; k < generators_.size(); ++k) {
    const auto& g = generators_[k];
    if (!names.insert(g.name).second) throw InvalidArgument("duplicate generator name '" + g.name + "'");
    if (g.kind == GeneratorKind::ClassicalUnit) {
      if (unit_axis_) throw InvalidArgument("a lattice holds at most one classical-unit generator");
      if (g.value != 1.0) throw InvalidArgument("classical-unit generator must have value 1");
      unit_axis_ = k;
    } else {
      if (!(g.value > 0.0) || !std::isfinite(g.value)) {
        throw InvalidArgument("generator '" + g.name + "' must have a positive value");
      }
      if (std::abs(g.value - std::nearbyint(g.value)) < 1e-12) {
        throw InvalidArgument("fractional generator '" + g.name + "' has an integer value");
      }
    }
  }
}

std::optional<std::size_t> ExponentLattice::axis_of(const std::string& name) const {
  for (std::size_t k = 0; k < generators_.size(); ++k) {
    if (generators_[k].name == name) return k;
  }
  return std::nullopt;
}

Exponent ExponentLattice::at(const MultiIndex& index) const {
  if (index.size() != rank()) throw LatticeError("index rank does not match lattice");
  return Exponent{index, 0};
}

Exponent ExponentLattice::axis(std::size_t k, long long count) const {
  Exponent e = zero();
  e.index.at(k) = count;
  return e;
}

Exponent ExponentLattice::normalize(Exponent e) const {
  if (unit_axis_ && e.offset != Rational(0)) {
    long long whole = e.offset.numerator() / e.offset.denominator();
    if (e.offset < Rational(0) && Rational(whole) != e.offset) --whole;
    e.index[*unit_axis_] += whole;
    e.offset -= whole;
  }
  return e;
}

double ExponentLattice::value(const Exponent& e) const {
  double v = to_double(e.offset);
  for (std::size_t k = 0; k < rank(); ++k) v += static_cast<double>(e.index[k]) * generators_[k].value;
  return v;
}

double ExponentLattice::value(const MultiIndex& index) const {
  double v = 0.0;
  for (std::size_t k = 0; k < rank(); ++k) v += static_cast<double>(index[k]) * generators_[k].value;
  return v;
}

bool ExponentLattice::is_integer(const Exponent& e) const {
  for (std::size_t k = 0; k < rank(); ++k) {
    if (generators_[k].kind == GeneratorKind::Fractional && e.index[k] != 0) return false;
  }
  return e.offset.denominator() == 1;
}

std::optional<Exponent> ExponentLattice::express(const LinearForm& form) const {
  Exponent e = zero();
  for (const auto& [param, coeff] : form.coefficients()) {
    bool placed = false;
    for (std::size_t k = 0; k < rank(); ++k) {
      const auto& g = generators_[k];
      if (g.kind != GeneratorKind::Fractional || g.parameter != param) continue;
      Rational multiple = coeff / g.scale;
      if (multiple.denominator() != 1) return std::nullopt;
      e.index[k] += multiple.numerator();
      placed = true;
      break;
    }
    if (!placed) return std::nullopt;
  }
  e.offset = form.constant();
  return normalize(e);
}

std::optional<Exponent> ExponentLattice::express_value(double v) const {
  for (std::size_t k = 0; k < rank(); ++k) {
    if (generators_[k].kind == GeneratorKind::Fractional &&
        std::abs(generators_[k].value - v) <= 1e-12 * std::max(1.0, std::abs(v))) {
      return axis(k);
    }
  }
  // small-denominator rational constant
  for (long long den = 1; den <= 64; ++den) {
    double num = v * static_cast<double>(den);
    double rounded = std::nearbyint(num);
    if (std::abs(num - rounded) <= 1e-12 * std::max(1.0, std::abs(num))) {
      Exponent e = zero();
      e.offset = Rational(static_cast<long long>(rounded), den);
      return normalize(e);
    }
  }
  return std::nullopt;
}

ExponentLattice ExponentLattice::with_values(const ParameterValues& values) const {
  std::vector<ExponentGenerator> gens = generators_;
  for (auto& g : gens) {
    if (g.kind != GeneratorKind::Fractional) continue;
    if (auto it = values.find(g.name); it != values.end()) {
      g.value = it->second;
    } else if (auto jt = values.find(g.parameter); jt != values.end()) {
      g.value = to_double(g.scale) * jt->second;
    }
  }
  return ExponentLattice(std::move(gens));
}

std::string ExponentLattice::index_variable(std::size_t axis) {
  static const char* names[] = {"i", "j", "k", "l", "m", "n"};
  if (axis < 6) return names[axis];
  return "i" + std::to_string(axis);
}

namespace {

void append_term(std::string& out, bool negative, const std::string& body) {
  if (out.empty()) {
    out = negative ? "-" + body : body;
  } else {
    out += (negative ? " - " : " + ") + body;
  }
}

}  // namespace

std::string ExponentLattice::format(const Exponent& e) const {
  std::string out;
  for (std::size_t k = 0; k < rank(); ++k) {
    long long c = e.index[k];
    if (c == 0) continue;
    long long mag = c < 0 ? -c : c;
    const auto& g = generators_[k];
    std::string body;
    if (g.kind == GeneratorKind::ClassicalUnit) {
      body = std::to_string(mag);
    } else {
      body = mag == 1 ? g.name : std::to_string(mag) + "*" + g.name;
    }
    append_term(out, c < 0, body);
  }
  if (e.offset != Rational(0)) {
    bool negative = e.offset < Rational(0);
    append_term(out, negative, to_string(negative ? -e.offset : e.offset));
  }
  return out.empty() ? "0" : out;
}

std::string ExponentLattice::format_symbolic(const MultiIndex& shift, const Exponent& extra) const {
  std::string out;
  Exponent rest = extra;
  for (std::size_t k = 0; k < rank(); ++k) {
    std::string var = index_variable(k);
    long long s = shift.empty() ? 0 : shift[k];
    s += rest.index[k];
    rest.index[k] = 0;
    std::string inner = var;
    if (s > 0) inner = "(" + var + "+" + std::to_string(s) + ")";
    if (s < 0) inner = "(" + var + "-" + std::to_string(-s) + ")";
    const auto& g = generators_[k];
    std::string body = g.kind == GeneratorKind::ClassicalUnit ? inner : inner + "*" + g.name;
    append_term(out, false, body);
  }
  if (rest.offset != Rational(0)) {
    bool negative = rest.offset < Rational(0);
    append_term(out, negative, to_string(negative ? -rest.offset : rest.offset));
  }
  return out.empty() ? "0" : out;
}

bool operator==(const ExponentLattice& a, const ExponentLattice& b) {
  if (a.rank() != b.rank()) return false;
  for (std::size_t k = 0; k < a.rank(); ++k) {
    const auto& x = a.generators_[k];
    const auto& y = b.generators_[k];
    if (x.name != y.name || x.value != y.value || x.kind != y.kind) return false;
  }
  return true;
}

}  // namespace fracss
