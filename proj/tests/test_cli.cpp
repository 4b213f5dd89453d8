#include "doctest.h"
#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "covgen/report.hpp"
#include "json.hpp"

using namespace covgen;
using covgen::test::data_path;
using covgen::test::load;

namespace {

// Runs the covgen binary with `args`; returns the exit status.
int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(COVGEN_BINARY) + "' " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("covgen_test_" + name)).string();
}

std::string solver_flag() { return "--solver \"" + test::solver_options().command + "\""; }

AnalysisConfig config_for(const std::string& file, const std::string& entry) {
  AnalysisConfig c;
  c.input = data_path(file);
  c.entry = entry;
  c.k = 0;
  c.solver = test::solver_options();
  return c;
}

}  // namespace

TEST_CASE("report round trip") {
  AnalysisConfig c = config_for("fig2.sl", "foo");
  c.algorithm = Algorithm::Path;
  AnalysisResult r = analyze_program(load("fig2.sl"), c);
  ReportDocument doc = make_report(r, c);
  CHECK(doc.test_cases.size() == 2);
  for (const auto& tc : doc.test_cases) CHECK(tc.replay == "feasible");
  const std::string text = serialize_report(doc);
  ReportDocument back = parse_report(text);
  CHECK(back == doc);
  CHECK(serialize_report(back) == text);
}

TEST_CASE("report with summaries round trips") {
  AnalysisConfig c = config_for("summary.sl", "main");
  c.summaries = true;
  AnalysisResult r = analyze_program(load("summary.sl"), c);
  ReportDocument doc = make_report(r, c);
  REQUIRE(doc.summaries);
  CHECK(doc.summaries->count("foo") == 1);
  CHECK(parse_report(serialize_report(doc)) == doc);
}

TEST_CASE("large integers survive serialisation") {
  ReportDocument doc;
  ReportTestCase tc;
  tc.inputs["x$0"] = Int("123456789012345678901234567890");
  tc.inputs["y$0"] = Int(-3);
  tc.replay = "feasible";
  doc.test_cases.push_back(tc);
  const std::string text = serialize_report(doc);
  auto j = nlohmann::json::parse(text);
  CHECK(j["test_cases"][0]["inputs"]["x$0"].is_string());
  CHECK(j["test_cases"][0]["inputs"]["y$0"].is_number_integer());
  CHECK(parse_report(text) == doc);
}

TEST_CASE("malformed reports are rejected") {
  CHECK_THROWS_AS(parse_report("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_report("{\"version\": 3}"), std::invalid_argument);
}

TEST_CASE("exit code: full coverage") {
  const std::string out = temp_file("fig2.json");
  CHECK(run_cli("analyze " + data_path("fig2.sl") + " --entry foo --k 0 " + solver_flag() + " -o " + out) == 0);
  auto j = nlohmann::json::parse(test::read_text(out));
  CHECK(j["uncovered"].empty());
  std::filesystem::remove(out);
}

TEST_CASE("exit code: infeasible blocks") {
  CHECK(run_cli("analyze " + data_path("dead_block.sl") + " " + solver_flag() + " -o /dev/null") == 1);
}

TEST_CASE("exit code: errors") {
  CHECK(run_cli("analyze " + data_path("fig2.sl") + " --solver /nonexistent/solver -o /dev/null") == 2);
  CHECK(run_cli("analyze /nonexistent/file.sl -o /dev/null") == 2);
  CHECK(run_cli("analyze --algo vstte " + data_path("fig2.sl")) == 2);
  CHECK(run_cli("parse " + data_path("fig2.sl")) == 0);
}

TEST_CASE("exit code: solver timeout") {
  CHECK(run_cli("analyze " + data_path("fig2.sl") + " --timeout 1 --solver \"sh " +
                std::string(COVGEN_FAKE_SOLVER) + "\" -o /dev/null") == 3);
}

TEST_CASE("the solver can come from the environment") {
  CHECK(run_cli("analyze " + data_path("fig2.sl") + " --entry foo -o /dev/null",
                "COVGEN_SOLVER=/nonexistent/solver") == 2);
}

TEST_CASE("gen, oracle and bench subcommands") {
  const std::string prog = temp_file("gen.sl");
  CHECK(run_cli("gen --diamonds 2 --seed 3 -o " + prog) == 0);
  CHECK(run_cli("parse " + prog) == 0);
  CHECK(run_cli("oracle " + prog + " " + solver_flag()) == 0);
  const std::string csv = temp_file("bench.csv");
  CHECK(run_cli("bench --diamonds 2 --per 1 --algos stmt,fm " + solver_flag() + " --csv " + csv) == 0);
  CHECK(test::read_text(csv).rfind("program_id,diamonds,seed,algo,", 0) == 0);
  std::filesystem::remove(prog);
  std::filesystem::remove(csv);
}
