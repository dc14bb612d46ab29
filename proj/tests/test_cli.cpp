#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracss/cli.hpp"
#include "fracss/special_functions.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace fracss;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string problem_path(const std::string& name) {
  const char* dir = std::getenv("FRACSS_PROBLEMS");
  REQUIRE(dir != nullptr);
  return (fs::path(dir) / (name + ".json")).string();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fracss_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void dump(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// second column of a "t,series,..." csv
std::vector<double> series_column(const std::string& csv) {
  std::vector<double> v;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    auto a = line.find(',');
    auto b = line.find(',', a + 1);
    v.push_back(std::stod(line.substr(a + 1, b - a - 1)));
  }
  return v;
}

}  // namespace

TEST_CASE("solve writes coefficients and a report") {
  auto dir = scratch("solve");
  auto r = run({"solve", problem_path("relaxation"), "--out", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("status: mittag-leffler") != std::string::npos);
  auto csv = slurp(dir / "relaxation_coefficients.csv");
  CHECK(csv.rfind("alpha,offset,coefficient\n0,0,1\n", 0) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "relaxation_report.json"));
  CHECK(report["status"] == "mittag-leffler");
  CHECK(report["coefficients"].size() == 65);

  auto json_dir = scratch("solve_json");
  CHECK(run({"solve", problem_path("relaxation"), "--format", "json", "--out", json_dir.string()}).code == kExitOk);
  CHECK(!fs::exists(json_dir / "relaxation_coefficients.csv"));
  CHECK(fs::exists(json_dir / "relaxation_report.json"));
}

TEST_CASE("coupled problems exit with the recurrence-only code") {
  auto dir = scratch("coupled");
  auto r = run({"solve", problem_path("coupled"), "--out", dir.string()});
  CHECK(r.code == kExitRecurrenceOnly);
  CHECK(r.out.find("relations:") != std::string::npos);
  CHECK(!fs::exists(dir / "coupled_coefficients.csv"));
  auto report = nlohmann::json::parse(slurp(dir / "coupled_report.json"));
  CHECK(report["status"] == "recurrence-only");
  CHECK(!report["relations"].empty());

  CHECK(run({"eval", problem_path("coupled")}).code == kExitRecurrenceOnly);
  CHECK(run({"verify", problem_path("coupled")}).code == kExitRecurrenceOnly);
}

TEST_CASE("bad input exits with an error") {
  auto dir = scratch("bad");
  dump(dir / "empty.json", R"js({"parameters": {"alpha": 0.5}, "terms": [], "initial_conditions": {"y(0)": 1}})js");
  auto r = run({"solve", (dir / "empty.json").string(), "--out", dir.string()});
  CHECK(r.code == kExitError);
  CHECK(r.err.rfind("error:", 0) == 0);

  dump(dir / "broken.json", "{\n  \"parameters\": {\"alpha\": 0.5},\n  \"terms\": [,]\n}\n");
  r = run({"solve", (dir / "broken.json").string()});
  CHECK(r.code == kExitError);
  CHECK(r.err.find("line 3") != std::string::npos);

  CHECK(run({"solve", (dir / "missing.json").string()}).code == kExitError);
  CHECK(run({"frobnicate"}).code == kExitError);
  CHECK(run({"solve", problem_path("relaxation"), "--format", "xml"}).code == kExitError);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("eval from a saved report matches eval from the problem") {
  auto dir = scratch("eval");
  REQUIRE(run({"solve", problem_path("oscillation"), "--out", dir.string()}).code == kExitOk);
  auto direct = run({"eval", problem_path("oscillation"), "--t", "0,0.3,1"});
  auto saved = run({"eval", (dir / "oscillation_report.json").string(), "--t", "0,0.3,1"});
  CHECK(direct.code == kExitOk);
  CHECK(saved.code == kExitOk);
  CHECK(direct.out == saved.out);

  auto r = run({"eval", problem_path("oscillation"), "--t", "0,1", "--out", dir.string(), "--format", "json"});
  CHECK(r.code == kExitOk);
  auto rows = nlohmann::json::parse(slurp(dir / "oscillation_eval.json"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["t"] == 0.0);
}

TEST_CASE("eval values") {
  auto problem = nlohmann::json::parse(slurp(problem_path("oscillation")));
  double y0 = problem["initial_conditions"]["y(0)"];
  auto ys = series_column(run({"eval", problem_path("oscillation"), "--t", "0,1"}).out);
  REQUIRE(ys.size() == 2);
  CHECK(ys[0] == y0);

  auto dir = scratch("eval_values");
  dump(dir / "osc.json", examples::oscillation(1.5, 1.0, 1.0, 0.0));
  ys = series_column(run({"eval", (dir / "osc.json").string(), "--t", "1"}).out);
  REQUIRE(ys.size() == 1);
  CHECK(std::abs(ys[0] - mittag_leffler(MittagLefflerParams(1.5, 1.0), -1.0)) < 1e-10);

  dump(dir / "wright.json", examples::wright(0.5, 1.3));
  ys = series_column(run({"eval", (dir / "wright.json").string(), "--t", "1"}).out);
  REQUIRE(ys.size() == 1);
  CHECK(std::abs(ys[0] - oracle::gamma(1.3) * wright(WrightParams(0.5, 1.3), 2.0)) < 1e-10);
}

TEST_CASE("verify") {
  auto r = run({"verify", problem_path("relaxation")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("oracle: brute force N=8") != std::string::npos);

  auto dir = scratch("verify");
  REQUIRE(run({"solve", problem_path("relaxation"), "--out", dir.string()}).code == kExitOk);
  CHECK(run({"verify", (dir / "relaxation_report.json").string()}).code == kExitOk);

  auto report = nlohmann::json::parse(slurp(dir / "relaxation_report.json"));
  double v = report["coefficients"][2]["value"];
  report["coefficients"][2]["value"] = v * (1 + 1e-4);
  dump(dir / "perturbed.json", report.dump());
  r = run({"verify", (dir / "perturbed.json").string()});
  CHECK(r.code == kExitError);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("special functions from the command line") {
  auto r = run({"special", "ml", "--alpha", "1", "--z", "1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "z,value\n1,2.718281828459045\n");
  CHECK(run({"special", "ml2", "--alpha", "0.5", "--beta", "2", "--z", "0"}).out == "z,value\n0,1\n");
  r = run({"special", "wright", "--lambda", "0", "--mu", "1", "--z", "0,1", "--format", "json"});
  auto rows = nlohmann::json::parse(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[1]["value"].get<double>() - M_E) < 1e-14);
  r = run({"special", "kilbas-saigo", "--alpha", "0.5", "--m", "1", "--l", "2", "--z", "0.3"});
  CHECK(r.code == kExitOk);
  double ks = std::stod(r.out.substr(r.out.find(',', 8) + 1));
  CHECK(std::abs(ks - mittag_leffler(MittagLefflerParams(0.5, 2.0), 0.3)) < 1e-13);
  r = run({"special", "pwq", "--upper", "1:1", "--lower", "1:1", "--z", "0.5"});
  CHECK(std::abs(std::stod(r.out.substr(r.out.find('\n') + 5)) - std::exp(0.5)) < 1e-14);
  CHECK(run({"special", "ml", "--z", "1"}).code == kExitError);
  CHECK(run({"special", "pwq", "--upper", "1", "--z", "1"}).code == kExitError);
}

TEST_CASE("term cap from the environment") {
  const std::vector<std::string> args{"special", "ml", "--alpha", "1", "--z", "20"};
  CHECK(run(args).code == kExitOk);
  setenv("FRACSS_MAX_TERMS", "5", 1);
  auto r = run(args);
  CHECK(r.code == kExitError);
  auto with_flag = args;
  with_flag.insert(with_flag.end(), {"--max-terms", "400"});
  CHECK(run(with_flag).code == kExitOk);
  unsetenv("FRACSS_MAX_TERMS");
}
