#include "fracss/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "fracss/errors.hpp"

namespace fracss {

namespace {

Rational rational_gcd(Rational a, Rational b) {
  if (a == Rational(0)) return b;
  if (b == Rational(0)) return a;
  long long n = std::gcd(a.numerator() * b.denominator(), b.numerator() * a.denominator());
  return Rational(n, a.denominator() * b.denominator());
}

std::string number(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

// Visits every index with lower[k] <= q[k] <= upper[k].
void for_each_index(const MultiIndex& lower, const MultiIndex& upper, const std::function<void(const MultiIndex&)>& f) {
  const std::size_t d = lower.size();
  for (std::size_t k = 0; k < d; ++k) {
    if (upper[k] < lower[k]) return;
  }
  MultiIndex q = lower;
  while (true) {
    f(q);
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++q[k] <= upper[k]) break;
      q[k] = lower[k];
    }
    if (k == d) return;
  }
}

MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

bool nonnegative(const MultiIndex& m) {
  return std::all_of(m.begin(), m.end(), [](long long v) { return v >= 0; });
}

}  // namespace

// ---------------------------------------------------------------------------
// lattice construction

ExponentLattice build_lattice(const EquationSpec& eq) {
  eq.validate();
  std::vector<std::string> order;
  std::map<std::string, Rational> scale;
  std::vector<std::pair<std::string, double>> literals;
  bool need_unit = eq.max_initial_order() >= 1;

  auto visit = [&](const LinearForm& form) {
    for (const auto& [name, coeff] : form.coefficients()) {
      if (coeff == Rational(0)) continue;
      if (!scale.count(name)) order.push_back(name);
      scale[name] = rational_gcd(scale[name], boost::abs(coeff));
    }
    Rational c = form.constant();
    if (c == Rational(0)) return;
    if (c.denominator() != 1) {
      throw LatticeError("non-integer constant " + to_string(c) + " in exponent '" + form.str() +
                         "'; declare it as a parameter");
    }
    need_unit = true;
  };

  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& term : eq.terms) {
      for (const auto& step : term.ops) {
        if (const auto* d = std::get_if<DerivativeDescriptor>(&step)) {
          if (pass != 0) continue;
          if (d->kind() == DerivativeKind::Classical) {
            need_unit = true;
            continue;
          }
          if (d->ceiling() > 1) need_unit = true;
          if (d->symbolic_order()) {
            visit(*d->symbolic_order());
          } else {
            double v = d->order();
            std::string name = number(v);
            bool seen = std::any_of(literals.begin(), literals.end(), [&](const auto& l) { return l.first == name; });
            if (!seen) literals.emplace_back(name, v);
          }
        } else if (pass == 1) {
          visit(std::get<MonomialStep>(step).exponent);
        }
      }
    }
  }
  for (const auto& aux : eq.auxiliary) {
    if (aux.index.count("1") || (aux.sweep && *aux.sweep == "1")) need_unit = true;
  }

  std::vector<ExponentGenerator> gens;
  for (const auto& name : order) {
    auto it = eq.parameters.find(name);
    if (it == eq.parameters.end()) throw InvalidArgument("parameter '" + name + "' has no value");
    Rational s = scale[name];
    if (it->second < 0) s = -s;
    if (it->second == 0) throw InvalidArgument("parameter '" + name + "' must be non-zero");
    gens.push_back(ExponentGenerator::fractional(name, it->second, s));
  }
  for (const auto& [name, v] : literals) {
    if (std::abs(v - std::nearbyint(v)) < 1e-12) {
      need_unit = true;
      continue;
    }
    bool clash = std::any_of(gens.begin(), gens.end(), [&](const auto& g) { return std::abs(g.value - v) < 1e-12; });
    if (!clash) gens.push_back(ExponentGenerator::fractional(name, v));
  }
  if (need_unit) gens.push_back(ExponentGenerator::unit());
  return ExponentLattice(std::move(gens));
}

// ---------------------------------------------------------------------------
// balance relations

Exponent RecurrenceSystem::output_exponent(const MultiIndex& q) const { return lattice.at(q) + anchor; }

MultiIndex RecurrenceSystem::min_anchor() const {
  MultiIndex lo(lattice.rank(), 0);
  for (const auto& t : terms) {
    for (std::size_t k = 0; k < lo.size(); ++k) lo[k] = std::min(lo[k], -t.delta[k]);
  }
  return lo;
}

LogValue RecurrenceSystem::term_factor(std::size_t term, const MultiIndex& unknown) const {
  std::vector<LogValue> parts;
  for (const auto& c : terms.at(term).contributions) {
    LogValue f = LogValue::from(c.coeff);
    Exponent p = lattice.at(unknown);
    for (const auto& op : c.ops) {
      if (f.is_zero()) break;
      PowerImage img = apply_power(lattice, op, p);
      f = f * img.factor;
      p = img.exponent;
    }
    parts.push_back(f);
  }
  return log_sum(parts);
}

std::optional<RelationRow> RecurrenceSystem::instantiate(const MultiIndex& q) const {
  RelationRow row;
  row.anchor = q;
  row.exponent = output_exponent(q);
  bool any = false;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    MultiIndex m = add(q, terms[t].delta);
    if (!nonnegative(m)) continue;
    any = true;
    LogValue f = term_factor(t, m);
    if (!f.is_zero()) row.entries.push_back({m, t, f});
  }
  if (!any) return std::nullopt;
  return row;
}

namespace {

// Symbolic text of the factor a contribution applies to t^p, p written in
// index variables.
std::string symbolic_factor(const ExponentLattice& lattice, const Contribution& c, const MultiIndex& delta) {
  std::vector<std::string> parts;
  Exponent extra = lattice.zero();
  for (const auto& op : c.ops) {
    std::string p = lattice.format_symbolic(delta, extra);
    switch (op.kind) {
      case LatticeOp::Kind::Monomial:
        break;
      case LatticeOp::Kind::Caputo:
      case LatticeOp::Kind::RiemannLiouville:
      {
        std::string order = lattice.format(-op.shift);
        if (order.find_first_of(" +-") != std::string::npos) order = "(" + order + ")";
        parts.push_back("G(" + p + " + 1)/G(" + p + " + 1 - " + order + ")");
      }
        break;
      case LatticeOp::Kind::Conformable:
        parts.push_back("(" + p + ")");
        break;
      case LatticeOp::Kind::Classical:
        for (int k = 0; k < op.ceiling; ++k) {
          parts.push_back(k == 0 ? "(" + p + ")" : "(" + p + " - " + std::to_string(k) + ")");
        }
        break;
    }
    extra = extra + op.shift;
  }
  std::string out;
  for (const auto& part : parts) out += (out.empty() ? "" : "*") + part;
  if (out.empty()) return number(c.coeff);
  if (c.coeff == 1.0) return out;
  if (c.coeff == -1.0) return "-" + out;
  return number(c.coeff) + "*" + out;
}

std::string shifted_variable(std::size_t k, long long d) {
  std::string var = ExponentLattice::index_variable(k);
  return d == 0 ? var : (d > 0 ? var + "+" + std::to_string(d) : var + "-" + std::to_string(-d));
}

}  // namespace

std::string RecurrenceSystem::describe(const BalanceRelation& relation) const {
  const std::size_t d = lattice.rank();
  std::string lhs;
  for (std::size_t t : relation.present) {
    const auto& term = terms[t];
    std::string idx = "c[";
    for (std::size_t k = 0; k < d; ++k) idx += (k ? "," : "") + shifted_variable(k, term.delta[k]);
    idx += "]";
    std::string factor;
    for (std::size_t n = 0; n < term.contributions.size(); ++n) {
      if (n > 0) factor += " + ";
      factor += symbolic_factor(lattice, term.contributions[n], term.delta);
    }
    bool negative = term.contributions.size() == 1 && factor.front() == '-';
    if (negative) factor.erase(0, 1);
    if (lhs.empty()) {
      lhs = negative ? "-" : "";
    } else {
      lhs += negative ? " - " : " + ";
    }
    if (factor == "1") {
      lhs += idx;
    } else {
      lhs += idx + "*" + (term.contributions.size() > 1 ? "(" + factor + ")" : factor);
    }
  }
  std::vector<std::string> region;
  for (std::size_t k = 0; k < d; ++k) {
    region.push_back(ExponentLattice::index_variable(k) + " >= " + std::to_string(relation.lower[k]));
  }
  // each absent term has some coordinate below its reach
  std::vector<std::vector<std::string>> absent;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (std::find(relation.present.begin(), relation.present.end(), t) != relation.present.end()) continue;
    std::vector<std::string> alts;
    for (std::size_t k = 0; k < d; ++k) {
      if (relation.lower[k] < -terms[t].delta[k]) {
        alts.push_back(ExponentLattice::index_variable(k) + " < " + std::to_string(-terms[t].delta[k]));
      }
    }
    if (!alts.empty()) absent.push_back(std::move(alts));
  }
  auto implied = [&](const std::vector<std::string>& alts) {
    if (alts.size() == 1) return false;
    return std::any_of(absent.begin(), absent.end(), [&](const auto& other) {
      return other.size() == 1 && std::find(alts.begin(), alts.end(), other.front()) != alts.end();
    });
  };
  for (const auto& alts : absent) {
    if (implied(alts)) continue;
    std::string cond = alts.size() == 1 ? alts.front() : "";
    if (alts.size() > 1) {
      for (const auto& a : alts) cond += (cond.empty() ? "(" : " or ") + a;
      cond += ")";
    }
    if (std::find(region.begin(), region.end(), cond) == region.end()) region.push_back(cond);
  }
  std::string where;
  for (const auto& r : region) where += (where.empty() ? "" : ", ") + r;
  std::string text = lhs + " = 0  (" + where + ")";
  if (relation.boundary) text += " [boundary]";
  return text;
}

std::vector<std::string> RecurrenceSystem::describe_all() const {
  std::vector<std::string> out;
  for (const auto& r : relations) out.push_back(describe(r));
  return out;
}

namespace {

// A boundary relation whose rows near its corner are all empty (every present
// term annihilated there) says nothing and is left out of the description.
bool boundary_binds(const RecurrenceSystem& sys, const BalanceRelation& rel) {
  const std::size_t d = rel.lower.size();
  MultiIndex hi = rel.lower;
  for (auto& h : hi) h += 3;
  bool binds = false;
  for_each_index(rel.lower, hi, [&](const MultiIndex& q) {
    if (binds) return;
    for (std::size_t t = 0; t < sys.terms.size(); ++t) {
      if (std::find(rel.present.begin(), rel.present.end(), t) != rel.present.end()) continue;
      bool absent = false;
      for (std::size_t k = 0; k < d; ++k) absent = absent || q[k] < -sys.terms[t].delta[k];
      if (!absent) return;
    }
    try {
      auto row = sys.instantiate(q);
      binds = row && !row->entries.empty();
    } catch (const DomainError&) {
      binds = true;  // reported with its anchor further on
    }
  });
  return binds;
}

}  // namespace

RecurrenceSystem derive_balance(const EquationSpec& eq, const ExponentLattice& lattice) {
  eq.validate();
  RecurrenceSystem sys;
  sys.lattice = lattice;
  const std::size_t d = lattice.rank();

  for (const auto& term : eq.terms) {
    Contribution c;
    c.coeff = term.coeff;
    c.label = term.str();
    Exponent shift = lattice.zero();
    for (const auto& step : term.ops) {
      LatticeOp op = resolve(lattice, step);
      shift = lattice.normalize(shift + op.shift);
      c.ops.push_back(std::move(op));
    }
    if (shift.offset != Rational(0)) {
      throw LatticeError("term " + term.str() + " shifts exponents by " + lattice.format(shift) +
                         ", which leaves the lattice");
    }
    auto it = std::find_if(sys.terms.begin(), sys.terms.end(), [&](const auto& t) { return t.shift == shift; });
    if (it == sys.terms.end()) {
      sys.terms.push_back(RelationTerm{shift, {}, {}});
      it = sys.terms.end() - 1;
    }
    it->contributions.push_back(std::move(c));
  }

  for (const auto& [k, value] : eq.initial_conditions) {
    if (k >= 1 && !lattice.unit_axis()) {
      throw LatticeError("initial condition y^(" + std::to_string(k) +
                         ")(0) needs the classical-unit generator, which the lattice lacks");
    }
  }
  for (const auto& aux : eq.auxiliary) {
    for (const auto& [name, count] : aux.index) {
      (void)count;
      if (!lattice.axis_of(name)) throw LatticeError("auxiliary condition names unknown generator '" + name + "'");
    }
    if (aux.sweep && !lattice.axis_of(*aux.sweep)) {
      throw LatticeError("auxiliary condition sweeps unknown generator '" + *aux.sweep + "'");
    }
  }

  MultiIndex sigma = sys.terms.front().shift.index;
  for (const auto& t : sys.terms) {
    for (std::size_t k = 0; k < d; ++k) sigma[k] = std::max(sigma[k], t.shift.index[k]);
  }
  sys.anchor = lattice.at(sigma);
  for (auto& t : sys.terms) {
    t.delta.resize(d);
    for (std::size_t k = 0; k < d; ++k) t.delta[k] = sigma[k] - t.shift.index[k];
  }

  const std::size_t n = sys.terms.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    BalanceRelation rel;
    rel.lower.assign(d, std::numeric_limits<long long>::min());
    for (std::size_t t = 0; t < n; ++t) {
      if (!(mask & (std::size_t{1} << t))) continue;
      rel.present.push_back(t);
      for (std::size_t k = 0; k < d; ++k) rel.lower[k] = std::max(rel.lower[k], -sys.terms[t].delta[k]);
    }
    bool feasible = true;
    for (std::size_t t = 0; t < n && feasible; ++t) {
      if (mask & (std::size_t{1} << t)) continue;
      bool absent = false;
      for (std::size_t k = 0; k < d; ++k) absent = absent || rel.lower[k] < -sys.terms[t].delta[k];
      feasible = absent;
    }
    if (!feasible) continue;
    rel.boundary = rel.present.size() != n;
    if (rel.boundary && !boundary_binds(sys, rel)) continue;
    sys.relations.push_back(std::move(rel));
  }
  std::sort(sys.relations.begin(), sys.relations.end(),
            [](const auto& a, const auto& b) { return a.present.size() > b.present.size(); });

  // surface operator-domain failures on the leading part of the ansatz
  MultiIndex lo = sys.min_anchor();
  MultiIndex hi(d, 2);
  for_each_index(lo, hi, [&](const MultiIndex& q) {
    try {
      sys.instantiate(q);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (relation anchor " + format_index(q) + ")");
    }
  });
  return sys;
}

// ---------------------------------------------------------------------------
// finite-box analysis shared by zero propagation and chain solving

namespace {

constexpr std::size_t kMaxCells = 4'000'000;

struct Box {
  MultiIndex upper;
  MultiIndex inner;
  std::vector<std::size_t> stride;
  std::size_t cells = 1;

  bool contains(const MultiIndex& m) const {
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] < 0 || m[k] > upper[k]) return false;
    }
    return true;
  }
  bool in_inner(const MultiIndex& m) const {
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] > inner[k]) return false;
    }
    return true;
  }
  std::size_t id(const MultiIndex& m) const {
    std::size_t r = 0;
    for (std::size_t k = 0; k < m.size(); ++k) r += static_cast<std::size_t>(m[k]) * stride[k];
    return r;
  }
  MultiIndex index(std::size_t id) const {
    MultiIndex m(upper.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      m[k] = static_cast<long long>(id % static_cast<std::size_t>(upper[k] + 1));
      id /= static_cast<std::size_t>(upper[k] + 1);
    }
    return m;
  }
};

struct FlatEntry {
  std::size_t id;
  std::size_t term;
  LogValue factor;
};

struct FlatRow {
  MultiIndex anchor;
  std::vector<FlatEntry> entries;
};

struct Analysis {
  Box box;
  int max_index = 0;
  std::size_t accidental = 0;  // entries that vanish only at these parameter values
  std::vector<FlatRow> rows;
  std::vector<char> zero;
  std::vector<int> live;  // surviving entries per row
};

// Coordinates any auxiliary condition or initial condition pins.
MultiIndex condition_extent(const RecurrenceSystem& sys, const EquationSpec* eq, const SolveOptions* opt) {
  MultiIndex ext(sys.lattice.rank(), 0);
  if (eq) {
    if (auto u = sys.lattice.unit_axis()) ext[*u] = eq->max_initial_order();
    for (const auto& aux : eq->auxiliary) {
      for (const auto& [name, count] : aux.index) {
        if (auto k = sys.lattice.axis_of(name)) ext[*k] = std::max(ext[*k], count);
      }
    }
  }
  if (opt) {
    for (const auto& [idx, v] : opt->seeds) {
      (void)v;
      for (std::size_t k = 0; k < ext.size() && k < idx.size(); ++k) ext[k] = std::max(ext[k], idx[k]);
    }
  }
  return ext;
}

Box make_box(const RecurrenceSystem& sys, int max_index, const MultiIndex& ext, int* used_index) {
  const std::size_t d = sys.lattice.rank();
  MultiIndex spread(d, 0);
  for (const auto& t : sys.terms) {
    for (std::size_t k = 0; k < d; ++k) spread[k] = std::max(spread[k], t.delta[k]);
  }
  for (int m = max_index; m >= 1; --m) {
    Box b;
    b.upper.resize(d);
    b.inner.resize(d);
    b.stride.resize(d);
    double cells = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      b.upper[k] = m * spread[k] + spread[k] + ext[k] + 2;
      b.inner[k] = b.upper[k] - spread[k] - 1;
      cells *= static_cast<double>(b.upper[k] + 1);
    }
    if (cells > static_cast<double>(kMaxCells) && m > 1) continue;
    std::size_t s = 1;
    for (std::size_t k = 0; k < d; ++k) {
      b.stride[k] = s;
      s *= static_cast<std::size_t>(b.upper[k] + 1);
    }
    b.cells = s;
    *used_index = m;
    return b;
  }
  throw SolveError(SolveError::Kind::Unsupported, {}, "index box is empty");
}

// Same system with every fractional generator nudged off its value, so that a
// factor is zero there only when the power rule makes it zero for all values.
RecurrenceSystem generic_copy(const RecurrenceSystem& sys) {
  std::vector<ExponentGenerator> gens = sys.lattice.generators();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (gens[k].kind == GeneratorKind::Fractional) {
      gens[k].value *= 1.0 + 1e-7 * std::sqrt(2.0 + static_cast<double>(k));
    }
  }
  RecurrenceSystem g = sys;
  g.lattice = ExponentLattice(std::move(gens));
  for (auto& t : g.terms) {
    for (auto& c : t.contributions) {
      for (auto& op : c.ops) {
        if (op.kind == LatticeOp::Kind::Caputo || op.kind == LatticeOp::Kind::RiemannLiouville) {
          op.order = g.lattice.value(-op.shift);
        }
      }
    }
  }
  return g;
}

Analysis analyse(const RecurrenceSystem& sys, int max_index, const MultiIndex& ext) {
  if (max_index < 1) throw InvalidArgument("max_index must be at least 1");
  Analysis a;
  const RecurrenceSystem generic = generic_copy(sys);
  a.box = make_box(sys, max_index, ext, &a.max_index);
  const Box& box = a.box;

  for_each_index(sys.min_anchor(), box.upper, [&](const MultiIndex& q) {
    FlatRow row;
    row.anchor = q;
    bool any = false;
    for (std::size_t t = 0; t < sys.terms.size(); ++t) {
      MultiIndex m = add(q, sys.terms[t].delta);
      if (!nonnegative(m)) continue;
      if (!box.contains(m)) return;  // relation reaches past the box
      any = true;
      LogValue f = sys.term_factor(t, m);
      if (f.is_zero()) {
        if (generic.term_factor(t, m).is_zero()) continue;
        ++a.accidental;
      }
      row.entries.push_back({box.id(m), t, f});
    }
    if (any && !row.entries.empty()) a.rows.push_back(std::move(row));
  });

  // unknown -> rows (CSR)
  std::vector<std::size_t> offsets(box.cells + 1, 0);
  for (const auto& r : a.rows) {
    for (const auto& e : r.entries) ++offsets[e.id + 1];
  }
  for (std::size_t i = 0; i < box.cells; ++i) offsets[i + 1] += offsets[i];
  std::vector<std::size_t> incidence(offsets.back());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    for (const auto& e : a.rows[r].entries) incidence[fill[e.id]++] = r;
  }

  a.zero.assign(box.cells, 0);
  a.live.resize(a.rows.size());
  std::deque<std::size_t> work;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    a.live[r] = static_cast<int>(a.rows[r].entries.size());
    if (a.live[r] == 1) work.push_back(r);
  }
  while (!work.empty()) {
    std::size_t r = work.front();
    work.pop_front();
    if (a.live[r] != 1) continue;
    for (const auto& e : a.rows[r].entries) {
      if (a.zero[e.id]) continue;
      a.zero[e.id] = 1;
      for (std::size_t p = offsets[e.id]; p < offsets[e.id + 1]; ++p) {
        std::size_t other = incidence[p];
        if (--a.live[other] == 1) work.push_back(other);
      }
    }
  }
  return a;
}

void summarise(const RecurrenceSystem& sys, const Analysis& a, ZeroAnalysis& z) {
  z.done = true;
  z.max_index = a.max_index;
  z.box = a.box.upper;
  z.inner = a.box.inner;
  z.forced_zero_count = static_cast<std::size_t>(std::count(a.zero.begin(), a.zero.end(), 1));
  z.surviving_count = a.box.cells - z.forced_zero_count;
  z.surviving.clear();
  z.surviving_complete = true;
  for (std::size_t id = 0; id < a.box.cells; ++id) {
    if (a.zero[id]) continue;
    MultiIndex m = a.box.index(id);
    if (!a.box.in_inner(m)) continue;
    if (z.surviving.size() == ZeroAnalysis::kSurvivorCap) {
      z.surviving_complete = false;
      break;
    }
    z.surviving.push_back(std::move(m));
  }
  std::sort(z.surviving.begin(), z.surviving.end());
  z.coupled = false;
  z.coupled_examples.clear();
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.live[r] < 3) continue;
    z.coupled = true;
    if (z.coupled_examples.size() < 3) {
      RelationRow row;
      row.anchor = a.rows[r].anchor;
      row.exponent = sys.output_exponent(row.anchor);
      for (const auto& e : a.rows[r].entries) {
        if (!a.zero[e.id]) row.entries.push_back({a.box.index(e.id), e.term, e.factor});
      }
      z.coupled_examples.push_back(std::move(row));
    }
  }
}

}  // namespace

RecurrenceSystem propagate_zeros(const RecurrenceSystem& system, int max_index) {
  RecurrenceSystem out = system;
  Analysis a = analyse(system, max_index, condition_extent(system, nullptr, nullptr));
  summarise(out, a, out.zeros);
  return out;
}

// ---------------------------------------------------------------------------
// chain solving

std::string to_string(SeedSource source) {
  switch (source) {
    case SeedSource::InitialCondition:
      return "initial-condition";
    case SeedSource::Auxiliary:
      return "auxiliary";
    case SeedSource::User:
      return "user";
  }
  return "unknown";
}

std::string SolutionReport::label() const {
  if (status == SolveStatus::RecurrenceOnly) return "recurrence-only";
  if (!closed_form) return "unrecognized";
  return closed_form->kind();
}

namespace {

double factorial(int k) { return std::tgamma(static_cast<double>(k) + 1.0); }

struct Condition {
  double value;
  SeedSource source;
  std::string description;
};

}  // namespace

SolutionReport solve_chains(const RecurrenceSystem& system, const EquationSpec& eq, const SolveOptions& opt) {
  const ExponentLattice& lat = system.lattice;
  const std::size_t d = lat.rank();
  SolutionReport rep;
  rep.series = Series(lat);

  Analysis a = analyse(system, opt.max_index, condition_extent(system, &eq, &opt));
  rep.recurrence = system;
  summarise(rep.recurrence, a, rep.recurrence.zeros);
  rep.max_index = a.max_index;
  if (a.max_index < opt.max_index) {
    rep.warnings.push_back("index box capped: chains truncated at " + std::to_string(a.max_index) + " steps");
  }
  const Box& box = a.box;

  auto recurrence_only = [&](const std::string& why) {
    rep.status = SolveStatus::RecurrenceOnly;
    rep.warnings.push_back(why);
    return rep;
  };
  if (rep.recurrence.zeros.coupled) {
    const auto& ex = rep.recurrence.zeros.coupled_examples.front();
    return recurrence_only("relation at exponent " + lat.format(ex.exponent) + " couples " +
                           std::to_string(ex.entries.size()) + " unknown coefficients");
  }

  // leading unknown of each two-term row
  std::vector<long long> lead_row(box.cells, -1);
  std::vector<std::size_t> trail_of(a.rows.size(), 0);
  std::vector<std::vector<std::size_t>> successors(box.cells);
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.live[r] != 2) continue;
    const FlatEntry* x = nullptr;
    const FlatEntry* y = nullptr;
    for (const auto& e : a.rows[r].entries) {
      if (a.zero[e.id]) continue;
      (x ? y : x) = &e;
    }
    double vx = lat.value(box.index(x->id));
    double vy = lat.value(box.index(y->id));
    if (vx == vy) {
      return recurrence_only("relation at anchor " + format_index(a.rows[r].anchor) +
                             " links two coefficients with the same exponent value");
    }
    if (vx < vy) std::swap(x, y);
    if (lead_row[x->id] >= 0) {
      return recurrence_only("coefficient " + format_index(box.index(x->id)) + " is fixed by more than one relation");
    }
    lead_row[x->id] = static_cast<long long>(r);
    trail_of[r] = y->id;
    successors[y->id].push_back(x->id);
  }

  // conditions
  std::map<std::size_t, Condition> conditions;
  auto place = [&](const MultiIndex& idx, Condition c) {
    if (!box.contains(idx)) return;
    std::size_t id = box.id(idx);
    if (a.zero[id]) {
      if (c.value != 0.0) {
        throw SolveError(SolveError::Kind::Overdetermined, idx,
                         c.description + " sets c" + format_index(idx) + " = " + number(c.value) +
                             ", but the balance relations force it to zero");
      }
      return;
    }
    if (lead_row[id] >= 0) {
      throw SolveError(SolveError::Kind::Overdetermined, idx,
                       c.description + " fixes c" + format_index(idx) + ", which a recurrence already determines");
    }
    auto [it, inserted] = conditions.emplace(id, c);
    if (!inserted && it->second.value != c.value) {
      throw SolveError(SolveError::Kind::Overdetermined, idx,
                       "conflicting conditions on c" + format_index(idx) + ": " + it->second.description + " and " +
                           c.description);
    }
  };
  for (const auto& [k, value] : eq.initial_conditions) {
    MultiIndex idx(d, 0);
    if (k > 0) idx[*lat.unit_axis()] = k;
    std::string desc = k == 0 ? "y(0)" : "y^(" + std::to_string(k) + ")(0)";
    place(idx, {value / factorial(k), SeedSource::InitialCondition, desc});
  }
  for (const auto& aux : eq.auxiliary) {
    MultiIndex idx(d, 0);
    for (const auto& [name, count] : aux.index) idx[*lat.axis_of(name)] = count;
    std::string desc = aux.description.empty() ? "auxiliary condition" : aux.description;
    if (!aux.sweep) {
      place(idx, {aux.value, SeedSource::Auxiliary, desc});
      continue;
    }
    std::size_t k = *lat.axis_of(*aux.sweep);
    for (; idx[k] <= box.upper[k]; ++idx[k]) place(idx, {aux.value, SeedSource::Auxiliary, desc});
  }
  for (const auto& [idx, value] : opt.seeds) {
    if (idx.size() != d) throw InvalidArgument("seed index " + format_index(idx) + " has the wrong rank");
    place(idx, {value, SeedSource::User, "seed"});
  }

  // forward substitution in ascending exponent value
  std::vector<std::size_t> ids;
  ids.reserve(box.cells);
  std::vector<double> values(box.cells, 0.0);
  for (std::size_t id = 0; id < box.cells; ++id) {
    if (!a.zero[id]) ids.push_back(id);
    values[id] = lat.value(box.index(id));
  }
  std::sort(ids.begin(), ids.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

  std::vector<LogValue> coef(box.cells);
  std::vector<int> depth(box.cells, -1);  // -1: undetermined
  std::size_t truncated = 0;
  for (std::size_t id : ids) {
    if (lead_row[id] >= 0) {
      const FlatRow& row = a.rows[static_cast<std::size_t>(lead_row[id])];
      std::size_t t = trail_of[static_cast<std::size_t>(lead_row[id])];
      if (depth[t] < 0 || depth[t] >= a.max_index) {
        if (depth[t] >= 0) ++truncated;
        continue;
      }
      LogValue fl, ft;
      for (const auto& e : row.entries) {
        if (e.id == id) fl = e.factor;
        if (e.id == t) ft = e.factor;
      }
      if (fl.is_zero()) {
        throw SolveError(SolveError::Kind::Unsupported, box.index(id),
                         "the relation fixing c" + format_index(box.index(id)) +
                             " degenerates at these parameter values");
      }
      coef[id] = -(ft * coef[t]) / fl;
      depth[id] = depth[t] + 1;
      continue;
    }
    MultiIndex idx = box.index(id);
    auto it = conditions.find(id);
    if (it == conditions.end()) {
      if (box.in_inner(idx)) {
        throw SolveError(SolveError::Kind::Underdetermined, idx,
                         "coefficient c" + format_index(idx) + " (t^{" + lat.format(lat.at(idx)) +
                             "}) is free: no initial or auxiliary condition fixes it");
      }
      continue;
    }
    coef[id] = LogValue::from(it->second.value);
    depth[id] = 0;
    rep.free_coefficients.push_back({idx, it->second.value, it->second.source, it->second.description});
  }
  for (std::size_t id = 0; id < box.cells; ++id) {
    if (depth[id] >= 0 && !coef[id].is_zero()) rep.series.add(box.index(id), coef[id].value());
  }
  if (truncated > 0) {
    rep.warnings.push_back(std::to_string(truncated) + " chain(s) truncated at max_index = " +
                           std::to_string(a.max_index));
  }

  // chains from each seed
  for (const auto& fc : rep.free_coefficients) {
    Chain chain;
    chain.seed = fc.index;
    chain.members.push_back(fc.index);
    std::size_t cur = box.id(fc.index);
    while (true) {
      std::vector<std::size_t> next;
      for (std::size_t s : successors[cur]) {
        if (depth[s] >= 0) next.push_back(s);
      }
      if (next.empty()) break;
      if (next.size() > 1) {
        chain.uniform = false;
        break;
      }
      const FlatRow& row = a.rows[static_cast<std::size_t>(lead_row[next[0]])];
      std::size_t lt = 0, tt = 0;
      for (const auto& e : row.entries) {
        if (e.id == next[0]) lt = e.term;
        if (e.id == cur) tt = e.term;
      }
      chain.links.emplace_back(lt, tt);
      chain.members.push_back(box.index(next[0]));
      cur = next[0];
    }
    if (chain.members.size() >= 2) {
      chain.step.resize(d);
      for (std::size_t k = 0; k < d; ++k) chain.step[k] = chain.members[1][k] - chain.members[0][k];
      for (std::size_t n = 1; n < chain.members.size() && chain.uniform; ++n) {
        for (std::size_t k = 0; k < d; ++k) {
          if (chain.members[n][k] - chain.members[n - 1][k] != chain.step[k]) chain.uniform = false;
        }
        if (chain.links[n - 1] != chain.links.front()) chain.uniform = false;
      }
    } else {
      chain.step.assign(d, 0);
    }
    rep.chains.push_back(std::move(chain));
  }

  if (a.accidental > 0) {
    rep.warnings.push_back(std::to_string(a.accidental) +
                           " relation factor(s) vanish only at these parameter values; treated as nonzero");
  }
  auto collisions = numeric_collisions(rep.series);
  if (!collisions.empty()) {
    rep.warnings.push_back(std::to_string(collisions.size()) +
                           " pair(s) of distinct exponents coincide numerically; evaluation merges them");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// closed-form recognition

std::string to_string(ClosedFormFamily family) {
  switch (family) {
    case ClosedFormFamily::MittagLeffler:
      return "mittag-leffler";
    case ClosedFormFamily::KilbasSaigo:
      return "kilbas-saigo";
    case ClosedFormFamily::Wright:
      return "wright";
  }
  return "unknown";
}

std::string ClosedForm::kind() const {
  if (components.size() == 1) return to_string(components.front().family);
  return "linear-combination";
}

double ClosedForm::evaluate(double t, SeriesOptions opt) const {
  CompensatedSum sum;
  for (const auto& c : components) {
    double pw = lattice.value(c.power);
    double base = pw == 0.0 ? 1.0 : std::pow(t, pw);
    double z = c.scale * std::pow(t, lattice.value(c.argument));
    double f = 0.0;
    switch (c.family) {
      case ClosedFormFamily::MittagLeffler:
        f = mittag_leffler(MittagLefflerParams(c.params.at(0), c.params.at(1)), z, opt);
        break;
      case ClosedFormFamily::KilbasSaigo:
        f = kilbas_saigo(KilbasSaigoParams(c.params.at(0), c.params.at(1), c.params.at(2)), z, opt);
        break;
      case ClosedFormFamily::Wright:
        f = wright(WrightParams(c.params.at(0), c.params.at(1)), z, opt);
        break;
    }
    sum.add(c.prefactor * base * f);
  }
  return sum.value();
}

std::string ClosedForm::str() const {
  std::string out;
  for (const auto& c : components) {
    if (!out.empty()) out += " + ";
    std::string f;
    switch (c.family) {
      case ClosedFormFamily::MittagLeffler:
        f = "E_{" + number(c.params[0]) + "," + number(c.params[1]) + "}";
        break;
      case ClosedFormFamily::KilbasSaigo:
        f = "E_{" + number(c.params[0]) + "," + number(c.params[1]) + "," + number(c.params[2]) + "}";
        break;
      case ClosedFormFamily::Wright:
        f = "W_{" + number(c.params[0]) + "," + number(c.params[1]) + "}";
        break;
    }
    out += number(c.prefactor);
    if (c.power != lattice.zero()) out += "*t^{" + lattice.format(c.power) + "}";
    out += "*" + f + "(" + number(c.scale) + "*t^{" + lattice.format(c.argument) + "})";
  }
  return out.empty() ? "0" : out;
}

namespace {

// Γ(slope·i + intercept)
struct AffineGamma {
  double slope;
  double intercept;
};

bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)); }

bool same(const AffineGamma& a, const AffineGamma& b) {
  return close(a.slope, b.slope) && close(a.intercept, b.intercept);
}

struct GammaStructure {
  double coeff = 0.0;
  std::vector<AffineGamma> num;
  std::vector<AffineGamma> den;
};

bool same_lists(std::vector<AffineGamma> a, std::vector<AffineGamma> b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const auto& y) { return same(x, y); });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return true;
}

// Factor a grouped term applies to t^{p0 + slope·i}, as gamma ratios in i.
std::optional<GammaStructure> term_structure(const ExponentLattice& lat, const RelationTerm& term, double p0,
                                             double slope) {
  std::optional<GammaStructure> total;
  for (const auto& c : term.contributions) {
    GammaStructure s;
    s.coeff = c.coeff;
    double x = p0;
    for (const auto& op : c.ops) {
      switch (op.kind) {
        case LatticeOp::Kind::Monomial:
          break;
        case LatticeOp::Kind::Caputo:
        case LatticeOp::Kind::RiemannLiouville:
          s.num.push_back({slope, x + 1.0});
          s.den.push_back({slope, x + 1.0 - op.order});
          break;
        case LatticeOp::Kind::Conformable:
          s.num.push_back({slope, x + 1.0});
          s.den.push_back({slope, x});
          break;
        case LatticeOp::Kind::Classical:
          s.num.push_back({slope, x + 1.0});
          s.den.push_back({slope, x + 1.0 - op.ceiling});
          break;
      }
      x += lat.value(op.shift);
    }
    if (!total) {
      total = s;
    } else if (same_lists(total->num, s.num) && same_lists(total->den, s.den)) {
      total->coeff += s.coeff;
    } else {
      return std::nullopt;
    }
  }
  return total;
}

void cancel(std::vector<AffineGamma>& num, std::vector<AffineGamma>& den) {
  for (auto it = num.begin(); it != num.end();) {
    auto jt = std::find_if(den.begin(), den.end(), [&](const auto& g) { return same(*it, g); });
    if (jt != den.end()) {
      den.erase(jt);
      it = num.erase(it);
    } else {
      ++it;
    }
  }
}

std::optional<ClosedFormComponent> recognize_chain(const SolutionReport& rep, const Chain& chain, double c0) {
  const auto& sys = rep.recurrence;
  const auto& lat = sys.lattice;
  if (!chain.uniform || chain.members.size() < 4) return std::nullopt;
  const auto [ta, tb] = chain.links.front();
  const double a = lat.value(chain.step);
  const double e0 = lat.value(chain.seed);
  // leading term acts at index i, trailing at i-1
  auto sa = term_structure(lat, sys.terms[ta], e0, a);
  auto sb = term_structure(lat, sys.terms[tb], e0 - a, a);
  if (!sa || !sb || sa->coeff == 0.0) return std::nullopt;

  double lambda = -sb->coeff / sa->coeff;
  std::vector<AffineGamma> num = sb->num;
  num.insert(num.end(), sa->den.begin(), sa->den.end());
  std::vector<AffineGamma> den = sb->den;
  den.insert(den.end(), sa->num.begin(), sa->num.end());
  cancel(num, den);

  ClosedFormComponent comp;
  comp.power = chain.seed.empty() ? lat.zero() : lat.at(chain.seed);
  comp.argument = lat.at(chain.step);
  bool factorial_pair = false;
  if (num.size() == 2 && den.size() == 2) {
    // Γ(s·i)/Γ(s·i + 1) = 1/(s·i)
    for (std::size_t x = 0; x < 2 && !factorial_pair; ++x) {
      for (std::size_t y = 0; y < 2 && !factorial_pair; ++y) {
        if (close(num[x].slope, den[y].slope) && std::abs(num[x].intercept) < 1e-12 &&
            close(den[y].intercept, 1.0)) {
          lambda /= num[x].slope;
          num.erase(num.begin() + static_cast<long>(x));
          den.erase(den.begin() + static_cast<long>(y));
          factorial_pair = true;
        }
      }
    }
  }
  if (num.size() != 1 || den.size() != 1 || !close(num[0].slope, den[0].slope)) return std::nullopt;
  const double u = num[0].slope;
  const double vn = num[0].intercept;
  const double vd = den[0].intercept;
  const double g = vd - vn;
  if (!(u > 0.0) || !(vd > 0.0)) return std::nullopt;

  // predicted c_i / c0
  std::function<double(int)> predicted;
  try {
    if (close(g, u)) {
      comp.family = factorial_pair ? ClosedFormFamily::Wright : ClosedFormFamily::MittagLeffler;
      comp.params = {u, vd};
      comp.prefactor = c0 * std::tgamma(vd);
      comp.scale = lambda;
      if (factorial_pair) {
        WrightParams(u, vd);
        predicted = [=](int i) {
          return std::pow(lambda, i) * std::exp(std::lgamma(vd) - std::lgamma(u * i + vd) - std::lgamma(i + 1.0));
        };
      } else {
        predicted = [=](int i) { return std::pow(lambda, i) * std::exp(std::lgamma(vd) - std::lgamma(u * i + vd)); };
      }
    } else if (!factorial_pair && g > 0.0) {
      KilbasSaigoParams ks(g, u / g, (vn + u - 1.0) / g);
      comp.family = ClosedFormFamily::KilbasSaigo;
      comp.params = {ks.alpha(), ks.m(), ks.l()};
      comp.prefactor = c0;
      comp.scale = lambda;
      predicted = [=](int i) { return std::pow(lambda, i) * kilbas_saigo_coefficient(ks, i); };
    } else {
      return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }

  const std::size_t n = std::min<std::size_t>(chain.members.size(), 8);
  for (std::size_t i = 1; i < n; ++i) {
    double actual = rep.series.coefficient(lat.at(chain.members[i])) / c0;
    double want = predicted(static_cast<int>(i));
    if (!(std::abs(actual - want) <= 1e-9 * std::max(std::abs(want), 1e-300))) return std::nullopt;
  }
  return comp;
}

}  // namespace

std::optional<ClosedForm> recognize_closed_form(const SolutionReport& report) {
  if (report.status != SolveStatus::Solved) return std::nullopt;
  ClosedForm form;
  form.lattice = report.recurrence.lattice;
  for (const auto& chain : report.chains) {
    double c0 = report.series.coefficient(form.lattice.at(chain.seed));
    if (c0 == 0.0) continue;
    auto comp = recognize_chain(report, chain, c0);
    if (!comp) return std::nullopt;
    form.components.push_back(std::move(*comp));
  }
  if (form.components.empty()) return std::nullopt;
  return form;
}

SolutionReport solve(const EquationSpec& eq, const SolveOptions& opt) {
  ExponentLattice lattice = build_lattice(eq);
  RecurrenceSystem sys = derive_balance(eq, lattice);
  SolutionReport rep = solve_chains(sys, eq, opt);
  rep.closed_form = recognize_closed_form(rep);
  return rep;
}

}  // namespace fracss
