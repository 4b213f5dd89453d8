#include "doctest.h"
#include "support.hpp"

#include "covgen/cfg.hpp"
#include "covgen/cover.hpp"
#include "covgen/error.hpp"
#include "covgen/exec.hpp"
#include "covgen/generator.hpp"
#include "covgen/vcgen.hpp"

using namespace covgen;
using covgen::test::load;
using covgen::test::program;

namespace {

const Procedure& foo() {
  static const Program p = load("fig2.sl");
  return *p.find("foo");
}

Cfg oracle_graph(const Program& p, const std::string& entry) {
  return lower(p, entry, UnwindConfig{}).unwound;
}

std::string chain(unsigned k) {
  std::string s = "proc main() {\n";
  for (unsigned i = 0; i < k; ++i) {
    const std::string n = std::to_string(i);
    s += "  s" + n + ": goto a" + n + ", b" + n + ";\n";
    s += "  a" + n + ": assume x" + n + " > 0; goto j" + n + ";\n";
    s += "  b" + n + ": assume x" + n + " <= 0; goto j" + n + ";\n";
    s += "  j" + n + ": goto " + (i + 1 < k ? "s" + std::to_string(i + 1) : std::string("end")) + ";\n";
  }
  return s + "  end:\n}\n";
}

}  // namespace

TEST_CASE("replay fig2 foo along the then branch") {
  PathTrace t = replay_path(foo(), {{"x", Int(0)}, {"y", Int(1)}}, {"l0", "l1", "l3"});
  CHECK(t.feasible());
  CHECK(t.final_state.at("z") == 1);
  CHECK(t.path == std::vector<std::string>{"l0", "l1", "l3"});
  REQUIRE(t.states.size() == 3);
  CHECK(t.states[2].at("z") == 1);
}

TEST_CASE("replay fig2 foo along the else branch blocks") {
  PathTrace t = replay_path(foo(), {{"x", Int(0)}, {"y", Int(1)}}, {"l0", "l2", "l3"});
  CHECK_FALSE(t.feasible());
  CHECK(t.blocked_label == "l2");
  CHECK(t.blocked_stmt == 0);
}

TEST_CASE("replay of an empty block leaves the inputs alone") {
  Program p = program("proc main() { l0: }");
  State in{{"x", Int(4)}};
  PathTrace t = replay_path(p.procedures[0], in, {"l0"});
  CHECK(t.feasible());
  CHECK(t.final_state == in);
}

TEST_CASE("replay rejects a path that is not in the graph") {
  CHECK_THROWS(replay_path(foo(), {}, {"l0", "l3"}));
}

TEST_CASE("replay a whole program through an inlined call") {
  Program p = load("fig2.sl");
  std::vector<Step> steps{{"main", "l0", 0}, {"foo", "l0", 1}, {"foo", "l1", 1}, {"foo", "l3", 1}};
  PathTrace t = replay_program(p, "main", {}, steps);
  CHECK(t.feasible());
  CHECK(t.final_state.at("r") == 1);
  steps[2].label = "l2";
  PathTrace blocked = replay_program(p, "main", {}, steps);
  CHECK_FALSE(blocked.feasible());
  CHECK(blocked.blocked_proc == "foo");
  CHECK(blocked.blocked_label == "l2");
}

TEST_CASE("replay inputs drop incarnation suffixes") {
  State in = replay_inputs({{"x$0", Int(3)}, {"v$i2$0", Int(-1)}});
  CHECK(in == State{{"x", Int(3)}, {"v$i2", Int(-1)}});
}

TEST_CASE("oracle on fig2 foo") {
  Program p = load("fig2.sl");
  SolverSession s(test::solver_options());
  OracleResult r = enumerate_paths_oracle(oracle_graph(p, "foo"), s);
  CHECK(r.path_count == 2);
  CHECK(r.paths.size() == 2);
  for (const auto& op : r.paths) CHECK(op.feasible);
  CHECK(r.feasible_block_union == std::set<std::string>{"l0", "l1", "l2", "l3", "$exit"});
  CHECK(s.stats().queries == 2);
}

TEST_CASE("oracle with a dead branch") {
  Program p = load("fig2_dead.sl");
  SolverSession s(test::solver_options());
  OracleResult r = enumerate_paths_oracle(oracle_graph(p, "foo"), s);
  CHECK(r.paths.size() == 2);
  std::size_t feasible = 0;
  for (const auto& op : r.paths) feasible += op.feasible ? 1 : 0;
  CHECK(feasible == 1);
  CHECK(r.feasible_block_union == std::set<std::string>{"l0", "l1", "l3", "$exit"});
}

TEST_CASE("oracle enumerates every path of a diamond chain") {
  for (unsigned k = 1; k <= 5; ++k) {
    Program p = program(chain(k));
    Cfg g = oracle_graph(p, "main");
    CHECK(count_paths(g, 1u << 20) == (std::size_t{1} << k));
    SolverSession s(test::solver_options());
    OracleResult r = enumerate_paths_oracle(g, s);
    CHECK(r.paths.size() == (std::size_t{1} << k));
    for (const auto& op : r.paths) CHECK(op.feasible);
  }
}

TEST_CASE("oracle path guard") {
  Program p = program(chain(4));
  SolverSession s(test::solver_options());
  try {
    enumerate_paths_oracle(oracle_graph(p, "main"), s, 8);
    FAIL("guard not enforced");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("16") != std::string::npos);
  }
  CHECK(s.stats().queries == 0);
}

TEST_CASE("count_paths saturates") {
  CHECK(count_paths(oracle_graph(program(chain(10)), "main"), 100) == 100);
}

TEST_CASE("oracle models replay along their paths") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GenConfig g;
    g.diamonds = 2;
    g.seed = seed;
    Program p = program(gen_program(g));
    Cfg graph = oracle_graph(p, "main");
    SolverSession s(test::solver_options());
    OracleResult r = enumerate_paths_oracle(graph, s);
    Procedure proc = graph.to_procedure();
    std::size_t feasible = 0;
    for (const auto& op : r.paths) {
      if (!op.feasible) continue;
      ++feasible;
      CHECK(replay_path(proc, op.inputs, op.path).feasible());
    }
    CHECK(feasible >= 1);
  }
}

TEST_CASE("vc models replay along their witness paths") {
  for (std::uint64_t seed = 11; seed <= 16; ++seed) {
    GenConfig g;
    g.diamonds = 3;
    g.seed = seed;
    Program p = program(gen_program(g));
    Lowering low = lower(p, "main", UnwindConfig{});
    VcBundle vc = build_reachability_vc(low.passive);
    CoverReport r = run_cover(Algorithm::Path, vc, test::solver_options());
    Procedure proc = low.unwound.to_procedure();
    for (const auto& tc : r.test_cases) {
      std::vector<std::string> path;
      for (const auto& l : tc.witness_path) {
        if (low.unwound.contains(l)) path.push_back(l);
      }
      PathTrace t = replay_path(proc, replay_inputs(tc.inputs), path);
      REQUIRE(t.feasible());
      // visible variables end at their last incarnation
      for (const auto& [v, i] : low.passive.last_incarnation) {
        auto it = tc.outputs.find(v + "$" + std::to_string(i));
        if (it != tc.outputs.end() && t.final_state.count(v)) CHECK(t.final_state.at(v) == it->second);
      }
    }
  }
}
