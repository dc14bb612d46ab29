#include "fracss/verification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fracss/errors.hpp"
#include "fracss/gamma.hpp"

namespace fracss {

long long TruncatedSystem::row_of(const Exponent& e) const {
  for (std::size_t r = 0; r < balance_rows; ++r) {
    if (row_exponents[r] == e) return static_cast<long long>(r);
  }
  return -1;
}

TruncatedSystem build_truncated_system(const EquationSpec& eq, const ExponentLattice& lattice, int N) {
  eq.validate();
  if (N < 1 || N > 16) throw InvalidArgument("truncation N must be in [1, 16]");
  const std::size_t d = lattice.rank();
  double cells = std::pow(static_cast<double>(N + 1), static_cast<double>(d));
  if (cells > 50000) throw InvalidArgument("truncated system too large for a dense solve");

  TruncatedSystem sys;
  sys.lattice = lattice;
  sys.N = N;

  MultiIndex m(d, 0);
  while (true) {
    sys.column[m] = sys.unknowns.size();
    sys.unknowns.push_back(m);
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++m[k] <= N) break;
      m[k] = 0;
    }
    if (k == d) break;
  }
  const std::size_t n = sys.unknowns.size();

  std::vector<Exponent> shifts;
  for (const auto& term : eq.terms) {
    Exponent s = lattice.zero();
    for (const auto& step : term.ops) s = lattice.normalize(s + resolve(lattice, step).shift);
    shifts.push_back(s);
  }

  std::map<Exponent, std::map<std::size_t, double>> rows;
  for (std::size_t col = 0; col < n; ++col) {
    for (const auto& term : eq.terms) {
      Series s(lattice);
      s.add(sys.unknowns[col], 1.0);
      for (const auto& step : term.ops) s = fracss::apply(s, step);
      for (const auto& [e, c] : s.terms()) rows[e][col] += term.coeff * c;
    }
  }

  auto inside = [&](const MultiIndex& idx) {
    return std::all_of(idx.begin(), idx.end(), [&](long long v) { return v <= N; });
  };
  for (const auto& [e, entries] : rows) {
    bool truncated = false;
    for (const auto& s : shifts) {
      Exponent src = lattice.normalize(e - s);
      if (src.offset != Rational(0)) continue;
      bool nonneg = std::all_of(src.index.begin(), src.index.end(), [](long long v) { return v >= 0; });
      if (nonneg && !inside(src.index)) truncated = true;
    }
    if (truncated) continue;
    std::vector<double> row(n, 0.0);
    bool any = false;
    for (const auto& [col, v] : entries) {
      row[col] = v;
      any = any || v != 0.0;
    }
    if (!any) continue;
    sys.matrix.push_back(std::move(row));
    sys.rhs.push_back(0.0);
    sys.row_exponents.push_back(e);
  }
  sys.balance_rows = sys.matrix.size();

  auto condition_row = [&](const MultiIndex& idx, double value) {
    auto it = sys.column.find(idx);
    if (it == sys.column.end()) return;
    std::vector<double> row(n, 0.0);
    row[it->second] = 1.0;
    sys.matrix.push_back(std::move(row));
    sys.rhs.push_back(value);
    sys.row_exponents.push_back(lattice.at(idx));
  };
  for (const auto& [k, value] : eq.initial_conditions) {
    MultiIndex idx(d, 0);
    if (k > 0) {
      if (!lattice.unit_axis()) throw LatticeError("derivative initial condition needs the classical-unit generator");
      idx[*lattice.unit_axis()] = k;
    }
    condition_row(idx, value / std::tgamma(k + 1.0));
  }
  for (const auto& aux : eq.auxiliary) {
    MultiIndex idx(d, 0);
    for (const auto& [name, count] : aux.index) {
      auto axis = lattice.axis_of(name);
      if (!axis) throw LatticeError("auxiliary condition names unknown generator '" + name + "'");
      idx[*axis] = count;
    }
    if (!aux.sweep) {
      condition_row(idx, aux.value);
      continue;
    }
    auto axis = lattice.axis_of(*aux.sweep);
    if (!axis) throw LatticeError("auxiliary condition sweeps unknown generator '" + *aux.sweep + "'");
    for (; idx[*axis] <= N; ++idx[*axis]) condition_row(idx, aux.value);
  }
  return sys;
}

std::map<MultiIndex, double> solve_truncated(const TruncatedSystem& sys) {
  const Eigen::Index rows = static_cast<Eigen::Index>(sys.matrix.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(sys.unknowns.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double scale = 0.0;
    for (double v : sys.matrix[r]) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = sys.matrix[r][c] / scale;
    b(r) = sys.rhs[r] / scale;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-13);
  if (qr.rank() < cols) {
    std::vector<MultiIndex> missing;
    for (Eigen::Index k = qr.rank(); k < cols; ++k) {
      missing.push_back(sys.unknowns[static_cast<std::size_t>(qr.colsPermutation().indices()(k))]);
    }
    std::string names;
    for (std::size_t k = 0; k < missing.size() && k < 8; ++k) names += (k ? ", " : "") + format_index(missing[k]);
    if (missing.size() > 8) names += ", ...";
    throw SolveError(SolveError::Kind::Underdetermined, missing.front(),
                     "truncated system is rank deficient; undetermined coefficients: " + names);
  }
  Eigen::VectorXd x = qr.solve(b);
  // one step of iterative refinement
  Eigen::VectorXd r = b - A * x;
  x += qr.solve(r);
  std::map<MultiIndex, double> out;
  for (Eigen::Index c = 0; c < cols; ++c) out[sys.unknowns[static_cast<std::size_t>(c)]] = x(c);
  return out;
}

namespace {

EquationSpec with_parameters(const EquationSpec& eq, const ParameterValues& values) {
  EquationSpec out = eq;
  out.parameters = values;
  for (auto& term : out.terms) {
    for (auto& step : term.ops) {
      auto* d = std::get_if<DerivativeDescriptor>(&step);
      if (d && d->symbolic_order()) step = DerivativeDescriptor(d->kind(), *d->symbolic_order(), values);
    }
  }
  return out;
}

}  // namespace

std::map<MultiIndex, double> brute_force_coefficients(const EquationSpec& eq, const ExponentLattice& lattice, int N) {
  try {
    return solve_truncated(build_truncated_system(eq, lattice, N));
  } catch (const SolveError&) {
    if (eq.parameters.empty()) throw;
    // Parameter values where distinct powers coincide can make factors vanish
    // that are nonzero nearby; take the symmetric limit instead.
    std::map<MultiIndex, double> mean;
    for (double sign : {-1.0, 1.0}) {
      ParameterValues nudged = eq.parameters;
      for (auto& [name, v] : nudged) v *= 1.0 + sign * 1e-6;
      EquationSpec near = with_parameters(eq, nudged);
      auto x = solve_truncated(build_truncated_system(near, lattice.with_values(nudged), N));
      for (const auto& [idx, v] : x) mean[idx] += 0.5 * v;
    }
    return mean;
  }
}

double max_relative_deviation(const std::map<MultiIndex, double>& reference, const Series& series, double floor) {
  if (floor < 0.0) {
    double scale = 0.0;
    for (const auto& [idx, ref] : reference) scale = std::max(scale, std::abs(ref));
    floor = std::max(1e-300, 1e-14 * scale);
  }
  double worst = 0.0;
  for (const auto& [idx, ref] : reference) {
    double got = series.coefficient(series.lattice().at(idx));
    double diff = std::abs(got - ref);
    double dev = diff == 0.0 ? 0.0 : diff / std::max(std::abs(ref), floor);
    worst = std::max(worst, dev);
  }
  return worst;
}

RelationCheck compare_relations(const RecurrenceSystem& sys, const TruncatedSystem& truncated, long long max_anchor,
                                double rtol) {
  RelationCheck out;
  const ExponentLattice& lat = sys.lattice;
  MultiIndex lo = sys.min_anchor();
  MultiIndex q = lo;
  const std::size_t d = q.size();
  while (true) {
    auto row = sys.instantiate(q);
    bool inside = row && !row->entries.empty();
    if (inside) {
      for (const auto& e : row->entries) inside = inside && truncated.column.count(e.index) > 0;
    }
    if (inside) {
      ++out.rows_compared;
      long long r = truncated.row_of(lat.normalize(row->exponent));
      if (r < 0) {
        out.mismatches.push_back("no truncated row at exponent " + lat.format(row->exponent));
        out.max_deviation = std::max(out.max_deviation, 1.0);
      } else {
        std::vector<double> expect(truncated.unknowns.size(), 0.0);
        for (const auto& e : row->entries) expect[truncated.column.at(e.index)] += e.factor.value();
        const auto& got = truncated.matrix[static_cast<std::size_t>(r)];
        double scale = 0.0;
        for (double v : got) scale = std::max(scale, std::abs(v));
        double dev = 0.0;
        for (std::size_t c = 0; c < expect.size(); ++c) dev = std::max(dev, std::abs(expect[c] - got[c]));
        dev /= scale > 0.0 ? scale : 1.0;
        out.max_deviation = std::max(out.max_deviation, dev);
        if (dev > rtol) {
          out.mismatches.push_back("row at exponent " + lat.format(row->exponent) + " differs by " +
                                   std::to_string(dev));
        }
      }
    }
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++q[k] <= max_anchor) break;
      q[k] = lo[k];
    }
    if (k == d) break;
  }
  return out;
}

std::vector<double> caputo_l1(const std::vector<double>& samples, double alpha, double h) {
  if (samples.size() < 2) throw InvalidArgument("caputo_l1 needs at least two grid points");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("caputo_l1 order must lie in (0,1)");
  if (!(h > 0.0)) throw InvalidArgument("caputo_l1 step must be positive");
  const std::size_t n = samples.size();
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) {
    b[k] = std::pow(static_cast<double>(k + 1), 1.0 - alpha) - std::pow(static_cast<double>(k), 1.0 - alpha);
  }
  const double scale = std::pow(h, -alpha) / std::tgamma(2.0 - alpha);
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < j; ++k) acc.add(b[k] * (samples[j - k] - samples[j - k - 1]));
    out[j] = scale * acc.value();
  }
  return out;
}

std::string to_string(ResidualScheme scheme) {
  return scheme == ResidualScheme::ExactSeries ? "exact-series" : "l1-quadrature";
}

double ResidualReport::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// L1 value at grid node n only.
double l1_at(const std::vector<double>& f, std::size_t n, double alpha, double h) {
  if (n == 0) return 0.0;
  CompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    double w = std::pow(static_cast<double>(k + 1), 1.0 - alpha) - std::pow(static_cast<double>(k), 1.0 - alpha);
    acc.add(w * (f[n - k] - f[n - k - 1]));
  }
  return std::pow(h, -alpha) / std::tgamma(2.0 - alpha) * acc.value();
}

double l1_term(const EquationTerm& term, const Series& y, const std::vector<std::size_t>& nodes, std::size_t node,
               double h) {
  const ExponentLattice& lat = y.lattice();
  Series s = y;
  std::size_t k = 0;
  for (; k < term.ops.size(); ++k) {
    const auto* d = std::get_if<DerivativeDescriptor>(&term.ops[k]);
    if (d && (d->kind() == DerivativeKind::Caputo || d->kind() == DerivativeKind::RiemannLiouville)) break;
    s = fracss::apply(s, term.ops[k]);
  }
  double t = static_cast<double>(nodes[node]) * h;
  if (k == term.ops.size()) return term.coeff * evaluate(s, t);

  const auto& d = std::get<DerivativeDescriptor>(term.ops[k]);
  double order = d.order();
  Series inner = s;
  if (d.kind() == DerivativeKind::Caputo) {
    int n = static_cast<int>(std::ceil(order));
    if (n > 1) {
      inner = apply_classical(s, n - 1);
      order -= n - 1;
    }
  }
  std::vector<double> f(nodes[node] + 1);
  for (std::size_t g = 0; g < f.size(); ++g) f[g] = evaluate(inner, static_cast<double>(g) * h);
  double value = l1_at(f, nodes[node], order, h);
  if (d.kind() == DerivativeKind::RiemannLiouville) value += f[0] * std::pow(t, -order) / std::tgamma(1.0 - order);

  for (++k; k < term.ops.size(); ++k) {
    const auto* mono = std::get_if<MonomialStep>(&term.ops[k]);
    if (!mono) {
      throw SolveError(SolveError::Kind::Unsupported, {},
                       "l1 residual supports only monomial factors outside a fractional derivative");
    }
    auto gamma = lat.express(mono->exponent);
    if (!gamma) throw LatticeError("monomial is not on the exponent lattice");
    value *= std::pow(t, lat.value(*gamma));
  }
  return term.coeff * value;
}

}  // namespace

ResidualReport residual(const EquationSpec& eq, const SolutionReport& rep, const std::vector<double>& points,
                        ResidualScheme scheme, double h) {
  ResidualReport out;
  out.scheme = scheme;
  out.h = h;
  out.points = points;
  if (rep.status != SolveStatus::Solved) {
    throw SolveError(SolveError::Kind::Unsupported, {}, "residual needs solved coefficients");
  }
  if (scheme == ResidualScheme::ExactSeries) {
    Series leftover(rep.series.lattice());
    for (const auto& term : eq.terms) {
      Series s = rep.series;
      for (const auto& step : term.ops) s = fracss::apply(s, step);
      leftover += term.coeff * s;
    }
    for (double t : points) out.values.push_back(evaluate(leftover, t));
    return out;
  }
  if (!(h > 0.0)) throw InvalidArgument("l1 residual needs a positive step");
  std::vector<std::size_t> nodes;
  for (double t : points) {
    double k = std::nearbyint(t / h);
    if (k < 1.0 || std::abs(k * h - t) > 1e-9 * std::max(1.0, t)) {
      throw InvalidArgument("residual point " + std::to_string(t) + " is not a positive multiple of h");
    }
    nodes.push_back(static_cast<std::size_t>(k));
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    CompensatedSum acc;
    for (const auto& term : eq.terms) acc.add(l1_term(term, rep.series, nodes, p, h));
    out.values.push_back(acc.value());
  }
  return out;
}

}  // namespace fracss
