#include "fracss/problem_file.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

#include "fracss/errors.hpp"

namespace fracss {

using nlohmann::json;

namespace {

// Line of every value in a JSON text, keyed by JSON pointer.  The text is
// assumed to be syntactically valid.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : s_(text) {
    if (!s_.empty()) value("");
  }

  int line(std::string path) const {
    while (true) {
      if (auto it = lines_.find(path); it != lines_.end()) return it->second;
      if (path.empty()) return 0;
      path.erase(path.rfind('/'));
    }
  }

 private:
  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out += s_[pos_++];
    }
    ++pos_;
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out += c;
      }
    }
    return out;
  }

  void value(const std::string& path) {
    ws();
    if (pos_ >= s_.size()) return;
    lines_[path] = line_;
    char c = s_[pos_];
    if (c == '{') {
      ++pos_;
      ws();
      if (s_[pos_] == '}') {
        ++pos_;
        return;
      }
      while (pos_ < s_.size()) {
        ws();
        std::string key = string();
        ws();
        ++pos_;  // ':'
        value(path + "/" + escape(key));
        ws();
        if (s_[pos_++] != ',') break;
      }
    } else if (c == '[') {
      ++pos_;
      ws();
      if (s_[pos_] == ']') {
        ++pos_;
        return;
      }
      for (int i = 0; pos_ < s_.size(); ++i) {
        value(path + "/" + std::to_string(i));
        ws();
        if (s_[pos_++] != ',') break;
      }
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < s_.size() && !std::strchr(",}] \t\r\n", s_[pos_])) ++pos_;
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Parser {
 public:
  Parser(const json& doc, const LineIndex* index) : doc_(doc), index_(index) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(path.empty() ? what : what + " (at " + path + ")", index_ ? index_->line(path) : 0);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  LinearForm form(const json& v, const std::string& path) const {
    try {
      if (v.is_number_integer()) return LinearForm(Rational(v.get<long long>()));
      if (v.is_number()) return LinearForm(parse_rational(format_double(v.get<double>())));
      if (v.is_string()) return LinearForm::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
    fail(path, "expected a number or a parameter expression");
  }

  DerivativeDescriptor derivative(const json& v, const std::string& path, const ParameterValues& params) const {
    if (!v.is_object()) fail(path, "derivative must be an object with 'kind' and 'order'");
    if (!v.contains("kind") || !v["kind"].is_string()) fail(path, "derivative needs a string 'kind'");
    try {
      DerivativeKind kind = parse_derivative_kind(v["kind"].get<std::string>());
      if (kind == DerivativeKind::Classical) {
        const json order = v.value("order", json(1));
        if (!order.is_number_integer()) fail(path + "/order", "classical derivative order must be an integer");
        return DerivativeDescriptor::classical(order.get<int>());
      }
      if (!v.contains("order")) fail(path, "derivative needs an 'order'");
      const json& order = v["order"];
      if (order.is_number()) return DerivativeDescriptor(kind, order.get<double>());
      return DerivativeDescriptor(kind, form(order, path + "/order"), params);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }

  Problem parse() const {
    if (!doc_.is_object()) fail("", "problem file must be a JSON object");
    Problem p;
    p.source = doc_;
    p.name = doc_.value("name", std::string());
    EquationSpec& eq = p.equation;

    if (doc_.contains("parameters")) {
      const json& params = doc_["parameters"];
      if (!params.is_object()) fail("/parameters", "parameters must be an object");
      for (const auto& [name, value] : params.items()) eq.parameters[name] = number(value, "/parameters/" + name);
    }

    if (!doc_.contains("terms") || !doc_["terms"].is_array()) fail("", "problem needs a 'terms' array");
    const json& terms = doc_["terms"];
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string path = "/terms/" + std::to_string(i);
      const json& t = terms[i];
      if (!t.is_object()) fail(path, "term must be an object");
      EquationTerm term;
      if (t.contains("coeff")) {
        const json& c = t["coeff"];
        if (c.is_number()) {
          term.coeff = c.get<double>();
        } else {
          try {
            term.coeff = form(c, path + "/coeff").evaluate(eq.parameters);
          } catch (const ParseError&) {
            throw;
          } catch (const std::exception& e) {
            fail(path + "/coeff", e.what());
          }
        }
      }
      if (t.contains("ops")) {
        if (t.contains("monomial") || t.contains("derivative")) {
          fail(path, "use either 'ops' or 'monomial'/'derivative', not both");
        }
        const json& ops = t["ops"];
        if (!ops.is_array()) fail(path + "/ops", "ops must be an array");
        for (std::size_t k = 0; k < ops.size(); ++k) {
          const std::string op_path = path + "/ops/" + std::to_string(k);
          const json& op = ops[k];
          if (op.is_object() && op.contains("monomial")) {
            term.ops.emplace_back(MonomialStep{form(op["monomial"], op_path + "/monomial")});
          } else if (op.is_object() && op.contains("derivative")) {
            term.ops.emplace_back(derivative(op["derivative"], op_path + "/derivative", eq.parameters));
          } else {
            fail(op_path, "operator must have 'monomial' or 'derivative'");
          }
        }
      } else {
        std::optional<DerivativeDescriptor> d;
        if (t.contains("derivative") && !t["derivative"].is_null()) {
          d = derivative(t["derivative"], path + "/derivative", eq.parameters);
        }
        LinearForm mono;
        if (t.contains("monomial")) mono = form(t["monomial"], path + "/monomial");
        term = EquationTerm::make(term.coeff, mono, d);
      }
      eq.terms.push_back(std::move(term));
    }

    if (doc_.contains("initial_conditions")) {
      const json& ics = doc_["initial_conditions"];
      if (!ics.is_object()) fail("/initial_conditions", "initial_conditions must be an object");
      for (const auto& [key, value] : ics.items()) {
        const std::string path = "/initial_conditions/" + key;
        auto k = parse_initial_condition_key(key);
        if (!k) fail(path, "unrecognised initial-condition key '" + key + "'");
        eq.initial_conditions[*k] = number(value, path);
      }
    }

    if (doc_.contains("auxiliary")) {
      const json& aux = doc_["auxiliary"];
      if (!aux.is_array()) fail("/auxiliary", "auxiliary must be an array");
      for (std::size_t i = 0; i < aux.size(); ++i) {
        const std::string path = "/auxiliary/" + std::to_string(i);
        const json& a = aux[i];
        if (!a.is_object()) fail(path, "auxiliary condition must be an object");
        AuxiliaryCondition c;
        c.description = a.value("description", std::string());
        if (a.contains("index")) {
          if (!a["index"].is_object()) fail(path + "/index", "index must map generator names to counts");
          for (const auto& [name, count] : a["index"].items()) {
            if (!count.is_number_integer() || count.get<long long>() < 0) {
              fail(path + "/index/" + name, "index counts must be non-negative integers");
            }
            c.index[name] = count.get<long long>();
          }
        }
        if (a.contains("sweep")) {
          if (!a["sweep"].is_string()) fail(path + "/sweep", "sweep must name a generator");
          c.sweep = a["sweep"].get<std::string>();
        }
        c.value = a.contains("value") ? number(a["value"], path + "/value") : 0.0;
        eq.auxiliary.push_back(std::move(c));
      }
    }

    if (doc_.contains("options")) {
      const json& o = doc_["options"];
      if (!o.is_object()) fail("/options", "options must be an object");
      if (o.contains("max_index")) {
        if (!o["max_index"].is_number_integer() || o["max_index"].get<int>() < 1) {
          fail("/options/max_index", "max_index must be a positive integer");
        }
        p.options.max_index = o["max_index"].get<int>();
      }
      if (o.contains("tol")) {
        p.options.tol = number(o["tol"], "/options/tol");
        if (!(p.options.tol > 0.0)) fail("/options/tol", "tol must be positive");
      }
    }

    try {
      eq.validate();
    } catch (const std::exception& e) {
      fail("/terms", e.what());
    }
    return p;
  }

 private:
  const json& doc_;
  const LineIndex* index_;
};

Rational parse_fraction(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_rational(text);
  return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

json exponent_to_json(const Exponent& e) { return json{{"index", e.index}, {"offset", to_string(e.offset)}}; }

Exponent exponent_from_json(const json& j) {
  return Exponent{j.at("index").get<MultiIndex>(), parse_fraction(j.at("offset").get<std::string>())};
}

}  // namespace

std::optional<int> parse_initial_condition_key(const std::string& key) {
  static const std::regex primes(R"(y('*)\(0\))");
  static const std::regex power(R"(y\^\((\d+)\)\(0\))");
  std::smatch m;
  if (std::regex_match(key, m, primes)) return static_cast<int>(m[1].length());
  if (std::regex_match(key, m, power)) return std::stoi(m[1].str());
  return std::nullopt;
}

Problem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "line L, column C" inside its message
    std::string what = e.what();
    int line = 0;
    static const std::regex at(R"(line (\d+))");
    std::smatch m;
    if (std::regex_search(what, m, at)) line = std::stoi(m[1].str());
    throw ParseError(what, line);
  }
  LineIndex index(text);
  return Parser(doc, &index).parse();
}

Problem parse_problem(const json& doc) { return Parser(doc, nullptr).parse(); }

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string coefficients_csv(const Series& series) {
  const ExponentLattice& lat = series.lattice();
  std::ostringstream out;
  for (const auto& g : lat.generators()) out << g.name << ",";
  out << "offset,coefficient\n";
  std::vector<std::pair<double, const std::pair<const Exponent, double>*>> rows;
  for (const auto& entry : series.terms()) rows.emplace_back(lat.value(entry.first), &entry);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [v, entry] : rows) {
    (void)v;
    for (long long i : entry->first.index) out << i << ",";
    out << to_string(entry->first.offset) << "," << format_double(entry->second) << "\n";
  }
  return out.str();
}

json lattice_to_json(const ExponentLattice& lattice) {
  json gens = json::array();
  for (const auto& g : lattice.generators()) {
    gens.push_back({{"name", g.name},
                    {"value", g.value},
                    {"kind", g.kind == GeneratorKind::ClassicalUnit ? "classical-unit" : "fractional"},
                    {"parameter", g.parameter},
                    {"scale", to_string(g.scale)}});
  }
  return gens;
}

ExponentLattice lattice_from_json(const json& doc) {
  std::vector<ExponentGenerator> gens;
  for (const auto& g : doc) {
    if (g.at("kind").get<std::string>() == "classical-unit") {
      gens.push_back(ExponentGenerator::unit());
      continue;
    }
    ExponentGenerator gen;
    gen.kind = GeneratorKind::Fractional;
    gen.name = g.at("name").get<std::string>();
    gen.value = g.at("value").get<double>();
    gen.parameter = g.value("parameter", gen.name);
    gen.scale = parse_fraction(g.value("scale", std::string("1")));
    gens.push_back(std::move(gen));
  }
  return ExponentLattice(std::move(gens));
}

json report_to_json(const Problem& problem, const SolutionReport& report) {
  const ExponentLattice& lat = report.recurrence.lattice;
  json j;
  j["format"] = "fracss-report";
  j["version"] = 1;
  j["problem"] = problem.source;
  j["status"] = report.label();
  j["lattice"] = lattice_to_json(lat);
  j["max_index"] = report.max_index;

  json coeffs = json::array();
  for (const auto& [e, c] : report.series.terms()) {
    coeffs.push_back({{"index", e.index}, {"offset", to_string(e.offset)}, {"exponent", lat.format(e)}, {"value", c}});
  }
  j["coefficients"] = std::move(coeffs);

  json seeds = json::array();
  for (const auto& f : report.free_coefficients) {
    seeds.push_back({{"index", f.index},
                     {"value", f.value},
                     {"source", to_string(f.source)},
                     {"description", f.description}});
  }
  j["free_coefficients"] = std::move(seeds);

  if (report.closed_form) {
    const ClosedForm& cf = *report.closed_form;
    json comps = json::array();
    for (const auto& c : cf.components) {
      comps.push_back({{"family", to_string(c.family)},
                       {"params", c.params},
                       {"prefactor", c.prefactor},
                       {"power", exponent_to_json(c.power)},
                       {"scale", c.scale},
                       {"argument", exponent_to_json(c.argument)}});
    }
    j["closed_form"] = {{"kind", cf.kind()}, {"expression", "y(t) = " + cf.str()}, {"components", std::move(comps)}};
  } else {
    j["closed_form"] = nullptr;
  }
  j["relations"] = report.recurrence.describe_all();
  j["warnings"] = report.warnings;
  return j;
}

bool is_report(const json& doc) {
  return doc.is_object() && doc.value("format", std::string()) == "fracss-report";
}

SavedSolution report_from_json(const json& doc) {
  if (!is_report(doc)) throw ParseError("not a solution report", 0);
  SavedSolution s;
  try {
    s.problem = parse_problem(doc.at("problem"));
    s.status = doc.at("status").get<std::string>();
    ExponentLattice lat = lattice_from_json(doc.at("lattice"));
    s.series = Series(lat);
    for (const auto& c : doc.at("coefficients")) s.series.add(exponent_from_json(c), c.at("value").get<double>());
    const json& cf = doc.at("closed_form");
    if (!cf.is_null()) {
      ClosedForm form;
      form.lattice = lat;
      for (const auto& c : cf.at("components")) {
        ClosedFormComponent comp;
        std::string fam = c.at("family").get<std::string>();
        if (fam == "mittag-leffler") {
          comp.family = ClosedFormFamily::MittagLeffler;
        } else if (fam == "kilbas-saigo") {
          comp.family = ClosedFormFamily::KilbasSaigo;
        } else if (fam == "wright") {
          comp.family = ClosedFormFamily::Wright;
        } else {
          throw ParseError("unknown closed-form family '" + fam + "'", 0);
        }
        comp.params = c.at("params").get<std::vector<double>>();
        comp.prefactor = c.at("prefactor").get<double>();
        comp.power = exponent_from_json(c.at("power"));
        comp.scale = c.at("scale").get<double>();
        comp.argument = exponent_from_json(c.at("argument"));
        form.components.push_back(std::move(comp));
      }
      s.closed_form = std::move(form);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
  return s;
}

}  // namespace fracss
