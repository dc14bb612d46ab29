#include "fracss/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "fracss/errors.hpp"
#include "fracss/problem_file.hpp"
#include "fracss/special_functions.hpp"
#include "fracss/verification.hpp"

namespace fracss {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  std::string file;
  int max_terms = 512;
  std::optional<double> tol;
  std::optional<int> max_index;
  std::string out_dir;
  std::string format = "csv";
};

struct Loaded {
  Problem problem;
  std::optional<SavedSolution> saved;
};

Loaded load_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_discarded() && is_report(doc)) {
    SavedSolution saved = report_from_json(doc);
    Problem p = saved.problem;
    return {std::move(p), std::move(saved)};
  }
  return {parse_problem(text), std::nullopt};
}

std::string stem_of(const Problem& p, const std::string& path) {
  return p.name.empty() ? fs::path(path).stem().string() : p.name;
}

SeriesOptions series_options(const Flags& f, const Problem& p) {
  SeriesOptions o;
  o.tol = f.tol.value_or(p.options.tol);
  o.max_terms = f.max_terms;
  return o;
}

SolutionReport run_solver(const Flags& f, const Problem& p) {
  SolveOptions so;
  so.max_index = f.max_index.value_or(p.options.max_index);
  return solve(p.equation, so);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream o(path);
  if (!o) throw InvalidArgument("cannot write '" + path.string() + "'");
  o << text;
}

std::string lattice_line(const ExponentLattice& lat) {
  std::string s;
  for (const auto& g : lat.generators()) {
    if (!s.empty()) s += ", ";
    s += g.kind == GeneratorKind::ClassicalUnit ? "1" : g.name + " = " + format_double(g.value);
  }
  return s;
}

int cmd_solve(const Flags& f, std::ostream& out) {
  Problem p = load_problem(f.file);
  SolutionReport rep = run_solver(f, p);
  std::string stem = stem_of(p, f.file);
  fs::path dir = f.out_dir.empty() ? fs::path(".") : fs::path(f.out_dir);

  out << "problem: " << stem << "\n";
  out << "status: " << rep.label() << "\n";
  out << "lattice: " << lattice_line(rep.recurrence.lattice) << "\n";
  for (const auto& w : rep.warnings) out << "warning: " << w << "\n";

  if (rep.status == SolveStatus::RecurrenceOnly) {
    out << "relations:\n";
    for (const auto& r : rep.recurrence.describe_all()) out << "  " << r << "\n";
  } else {
    out << "coefficients: " << rep.series.size() << " nonzero\n";
    if (rep.closed_form) out << "closed form: y(t) = " << rep.closed_form->str() << "\n";
  }

  if (f.format == "csv" && rep.status == SolveStatus::Solved) {
    fs::path csv = dir / (stem + "_coefficients.csv");
    write_file(csv, coefficients_csv(rep.series));
    out << "wrote " << csv.string() << "\n";
  }
  fs::path report = dir / (stem + "_report.json");
  write_file(report, report_to_json(p, rep).dump(2) + "\n");
  out << "wrote " << report.string() << "\n";
  return rep.status == SolveStatus::Solved ? kExitOk : kExitRecurrenceOnly;
}

int cmd_eval(const Flags& f, std::vector<double> ts, std::ostream& out, std::ostream& err) {
  Loaded in = load_input(f.file);
  Series series;
  std::optional<ClosedForm> closed;
  if (in.saved) {
    if (in.saved->status == "recurrence-only") {
      err << "error: the report has no coefficients (recurrence-only)\n";
      return kExitRecurrenceOnly;
    }
    series = in.saved->series;
    closed = in.saved->closed_form;
  } else {
    SolutionReport rep = run_solver(f, in.problem);
    if (rep.status == SolveStatus::RecurrenceOnly) {
      err << "error: no coefficients to evaluate: " << rep.warnings.back() << "\n";
      return kExitRecurrenceOnly;
    }
    series = rep.series;
    closed = rep.closed_form;
  }
  if (ts.empty()) {
    for (int k = 0; k <= 10; ++k) ts.push_back(k / 10.0);
  }
  SeriesOptions so = series_options(f, in.problem);

  std::ostringstream text;
  json samples = json::array();
  if (f.format == "csv") text << "t,series,closed_form,abs_diff\n";
  for (double t : ts) {
    double y = evaluate(series, t);
    std::optional<double> c;
    if (closed) c = closed->evaluate(t, so);
    if (f.format == "csv") {
      text << format_double(t) << "," << format_double(y) << ",";
      if (c) text << format_double(*c) << "," << format_double(std::abs(y - *c));
      else text << ",";
      text << "\n";
    } else {
      samples.push_back({{"t", t},
                         {"series", y},
                         {"closed_form", c ? json(*c) : json(nullptr)},
                         {"abs_diff", c ? json(std::abs(y - *c)) : json(nullptr)}});
    }
  }
  std::string body = f.format == "csv" ? text.str() : samples.dump(2) + "\n";
  if (f.out_dir.empty()) {
    out << body;
  } else {
    fs::path path = fs::path(f.out_dir) / (stem_of(in.problem, f.file) + "_eval." + f.format);
    write_file(path, body);
    out << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

struct VerifyFlags {
  int n = 8;
  double rtol = 1e-8;
  double residual_tol = 1e-9;
};

int cmd_verify(const Flags& f, const VerifyFlags& v, std::ostream& out) {
  Loaded in = load_input(f.file);
  const EquationSpec& eq = in.problem.equation;
  bool ok = true;

  if (!in.saved) {
    SolutionReport rep = run_solver(f, in.problem);
    if (rep.status == SolveStatus::RecurrenceOnly) {
      out << "status: recurrence-only\n";
      out << "residual: skipped, no coefficients\n";
      TruncatedSystem ts = build_truncated_system(eq, rep.recurrence.lattice, v.n);
      RelationCheck rc = compare_relations(rep.recurrence, ts, 3);
      out << "relations: " << rc.rows_compared << " rows compared with the N=" << v.n
          << " truncated system, max deviation " << format_double(rc.max_deviation);
      for (const auto& m : rc.mismatches) out << "\n  " << m;
      bool agree = rc.rows_compared > 0 && rc.mismatches.empty();
      out << (agree ? ": ok\n" : ": FAIL\n");
      return agree ? kExitRecurrenceOnly : kExitError;
    }
    in.saved = SavedSolution{in.problem, rep.label(), rep.series, rep.closed_form};
  }
  if (in.saved->status == "recurrence-only") {
    out << "status: recurrence-only\nresidual: skipped, no coefficients\n";
    return kExitRecurrenceOnly;
  }
  const Series& series = in.saved->series;
  out << "status: " << in.saved->status << "\n";

  try {
    auto bf = brute_force_coefficients(eq, series.lattice(), v.n);
    double dev = max_relative_deviation(bf, series);
    bool pass = dev <= v.rtol;
    ok = ok && pass;
    out << "oracle: brute force N=" << v.n << ", max relative deviation " << format_double(dev) << " (tol "
        << format_double(v.rtol) << "): " << (pass ? "ok" : "FAIL") << "\n";
  } catch (const SolveError& e) {
    ok = false;
    out << "oracle: brute force N=" << v.n << " failed: " << e.what() << "\n";
  }

  SolutionReport rep;
  rep.series = series;
  ResidualReport rr = residual(eq, rep, {0.25, 0.5, 0.75, 1.0});
  bool pass = rr.max_abs() <= v.residual_tol;
  ok = ok && pass;
  out << "residual: exact-series at t = 0.25, 0.5, 0.75, 1, max |r| " << format_double(rr.max_abs()) << " (tol "
      << format_double(v.residual_tol) << "): " << (pass ? "ok" : "FAIL") << "\n";
  return ok ? kExitOk : kExitError;
}

struct SpecialFlags {
  std::string name;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = 1.0;
  double m = std::numeric_limits<double>::quiet_NaN();
  double l = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  std::string upper;
  std::string lower;
  std::vector<double> z;
};

// "a:alpha,a:alpha" -> pairs
std::vector<GeneralizedWrightParams::Pair> parse_pairs(const std::string& text) {
  std::vector<GeneralizedWrightParams::Pair> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("pair '" + item + "' must be written a:alpha");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw InvalidArgument("pair '" + item + "' is not numeric");
    }
  }
  return out;
}

double need(double v, const char* flag, const std::string& fn) {
  if (std::isnan(v)) throw InvalidArgument(fn + " needs " + flag);
  return v;
}

int cmd_special(const Flags& f, const SpecialFlags& s, std::ostream& out) {
  SeriesOptions so;
  so.tol = f.tol.value_or(so.tol);
  so.max_terms = f.max_terms;
  std::function<double(double)> fn;
  if (s.name == "ml") {
    MittagLefflerParams p(need(s.alpha, "--alpha", s.name), 1.0);
    fn = [=](double z) { return mittag_leffler(p, z, so); };
  } else if (s.name == "ml2") {
    MittagLefflerParams p(need(s.alpha, "--alpha", s.name), s.beta);
    fn = [=](double z) { return mittag_leffler(p, z, so); };
  } else if (s.name == "kilbas-saigo") {
    KilbasSaigoParams p(need(s.alpha, "--alpha", s.name), need(s.m, "--m", s.name), need(s.l, "--l", s.name));
    fn = [=](double z) { return kilbas_saigo(p, z, so); };
  } else if (s.name == "wright") {
    WrightParams p(need(s.lambda, "--lambda", s.name), need(s.mu, "--mu", s.name));
    fn = [=](double z) { return wright(p, z, so); };
  } else if (s.name == "pwq") {
    GeneralizedWrightParams p(parse_pairs(s.upper), parse_pairs(s.lower));
    fn = [=](double z) { return generalized_wright(p, z, so); };
  } else {
    throw InvalidArgument("unknown function '" + s.name + "'");
  }

  if (f.format == "csv") {
    out << "z,value\n";
    for (double z : s.z) out << format_double(z) << "," << format_double(fn(z)) << "\n";
  } else {
    json rows = json::array();
    for (double z : s.z) rows.push_back({{"z", z}, {"value", fn(z)}});
    out << rows.dump(2) << "\n";
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, Flags& f, bool out_dir = true) {
  cmd->add_option("--max-terms", f.max_terms, "series term cap for special-function evaluation")
      ->envname("FRACSS_MAX_TERMS")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "series truncation tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  if (out_dir) cmd->add_option("--out", f.out_dir, "output directory");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized power series solutions of fractional differential equations", "fracss"};
  app.require_subcommand(1);
  Flags f;

  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file and write coefficients and a report");
  solve_cmd->add_option("file", f.file, "problem file")->required();
  solve_cmd->add_option("--max-index", f.max_index, "chain length limit")->check(CLI::PositiveNumber);
  add_common(solve_cmd, f);

  std::vector<double> ts;
  auto* eval_cmd = app.add_subcommand("eval", "sample a solution at given times");
  eval_cmd->add_option("file", f.file, "problem file or saved report")->required();
  eval_cmd->add_option("--t", ts, "sample times, comma separated")->delimiter(',')->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--max-index", f.max_index, "chain length limit")->check(CLI::PositiveNumber);
  add_common(eval_cmd, f);

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "check a solution against the brute-force oracle and residual");
  verify_cmd->add_option("file", f.file, "problem file or saved report")->required();
  verify_cmd->add_option("--n", vf.n, "truncation order of the brute-force system")->check(CLI::Range(1, 16));
  verify_cmd->add_option("--rtol", vf.rtol, "relative tolerance for coefficients")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--residual-tol", vf.residual_tol, "absolute residual tolerance")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--max-index", f.max_index, "chain length limit")->check(CLI::PositiveNumber);
  add_common(verify_cmd, f, false);

  SpecialFlags sf;
  auto* special_cmd = app.add_subcommand("special", "evaluate a special function");
  special_cmd->add_option("function", sf.name, "ml, ml2, kilbas-saigo, wright or pwq")
      ->required()
      ->check(CLI::IsMember({"ml", "ml2", "kilbas-saigo", "wright", "pwq"}));
  special_cmd->add_option("--alpha", sf.alpha);
  special_cmd->add_option("--beta", sf.beta);
  special_cmd->add_option("--m", sf.m);
  special_cmd->add_option("--l", sf.l);
  special_cmd->add_option("--lambda", sf.lambda);
  special_cmd->add_option("--mu", sf.mu);
  special_cmd->add_option("--upper", sf.upper, "upper pairs a:alpha,...");
  special_cmd->add_option("--lower", sf.lower, "lower pairs b:beta,...");
  special_cmd->add_option("--z", sf.z, "arguments, comma separated")->delimiter(',')->required();
  add_common(special_cmd, f, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*solve_cmd) return cmd_solve(f, out);
    if (*eval_cmd) return cmd_eval(f, ts, out, err);
    if (*verify_cmd) return cmd_verify(f, vf, out);
    return cmd_special(f, sf, out);
  } catch (const ParseError& e) {
    err << "error: " << f.file << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace fracss
