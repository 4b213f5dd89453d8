#include "doctest.h"
#include "support.hpp"

#include "covgen/analysis.hpp"
#include "covgen/cover.hpp"
#include "covgen/exec.hpp"
#include "covgen/summaries.hpp"
#include "covgen/vcgen.hpp"

using namespace covgen;
using covgen::test::load;
using covgen::test::program;

namespace {

UnwindConfig summary_mode() {
  UnwindConfig u;
  u.mode = CallMode::UseSummaries;
  return u;
}

Summary foo_summary(std::size_t cap, const std::vector<ExprPtr>& pre = {}) {
  return build_summary(load("summary.sl"), "foo", Algorithm::Path, cap, test::solver_options(), {},
                       summary_mode(), pre);
}

CoverReport cover_with(const Program& p, const std::string& entry, const SummaryTable& table) {
  Lowering low = lower(p, entry, summary_mode(), &table);
  return run_cover(Algorithm::Stmt, build_reachability_vc(low.passive), test::solver_options());
}

}  // namespace

TEST_CASE("summary of foo relates c to a by the sign of b") {
  Summary s = foo_summary(16);
  CHECK(s.visible == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(s.entries.size() == 2);
  bool up = false, down = false;
  for (const auto& e : s.entries) {
    const Int a = e.pre.at("a"), b = e.pre.at("b"), c = e.post.at("c");
    if (b >= 1) {
      CHECK(c == a + 1);
      up = true;
    } else {
      CHECK(b <= 0);
      CHECK(c == a - 1);
      down = true;
    }
  }
  CHECK(up);
  CHECK(down);
}

TEST_CASE("summary entries replay on the callee") {
  Program p = load("summary.sl");
  for (const auto& e : foo_summary(16).entries) {
    PathTrace t = replay_program(p, "foo", e.witness_inputs, e.witness);
    REQUIRE(t.feasible());
    CHECK(t.final_state.at("c") == e.post.at("c"));
    CHECK(t.final_state.at("a") == e.pre.at("a"));
  }
}

TEST_CASE("a blocking body has an empty summary") {
  Program p = program("proc f(x) returns y { l0: assume false; y := x; } proc main() { l0: }");
  Summary s = build_summary(p, "f", Algorithm::Stmt, 16, test::solver_options(), {}, summary_mode());
  CHECK(s.entries.empty());
  CHECK(is_false(summary_formula(s, [](const std::string& v) { return var(v); }, [] { return var("y"); })));
}

TEST_CASE("identity procedure") {
  Program p = program("proc id(x) returns y { l0: y := x; } proc main() { l0: }");
  Summary s = build_summary(p, "id", Algorithm::Path, 16, test::solver_options(), {}, summary_mode());
  REQUIRE(s.entries.size() == 1);
  CHECK(s.entries[0].post.at("y") == s.entries[0].pre.at("x"));
}

TEST_CASE("cap truncates") {
  CHECK(foo_summary(1).entries.size() == 1);
}

TEST_CASE("substituted call site shape") {
  Summary s = foo_summary(16);
  Program p = load("summary.sl");
  const auto& call = std::get<Call>(p.find("bar")->blocks[0].stmts[0]);
  std::vector<Stmt> stmts = substitute_call(call, s, 1);
  REQUIRE(stmts.size() == 4);
  CHECK(print_stmt(stmts[0]) == "assume a$s1 == x;");
  CHECK(print_stmt(stmts[1]) == "assume b$s1 == 1;");
  CHECK(std::holds_alternative<Assume>(stmts[2]));
  CHECK(print_stmt(stmts[3]) == "z := c$s1;");
  // the target gets exactly one new incarnation
  SummaryTable table{{"foo", s}};
  Lowering low = lower(p, "bar", summary_mode(), &table);
  CHECK(low.passive.last_incarnation.at("z") == 1u);
}

TEST_CASE("a call without a result binds only the arguments") {
  Program p = program("proc f(x) { l0: assume x > 0; } proc main() { l0: call f(3); }");
  Summary s = build_summary(p, "f", Algorithm::Path, 16, test::solver_options(), {}, summary_mode());
  std::vector<Stmt> stmts = substitute_call(std::get<Call>(p.find("main")->blocks[0].stmts[0]), s, 1);
  REQUIRE(stmts.size() == 2);
  CHECK(print_stmt(stmts[0]) == "assume x$s1 == 3;");
}

TEST_CASE("an empty summary blocks the call site") {
  Program p = load("summary.sl");
  Summary empty = foo_summary(16, {bool_lit(false)});
  CHECK(empty.entries.empty());
  CoverReport r = cover_with(p, "bar", {{"foo", empty}});
  CHECK(r.uncovered == std::set<std::string>{"l1"});
}

TEST_CASE("refinement with the caller's constants restores coverage") {
  Program p = load("summary.sl");
  // cap 1 and a precondition force the entry bar cannot use
  Summary wrong = foo_summary(1, {parse_expr("b <= 0")});
  REQUIRE(wrong.entries.size() == 1);
  CHECK(wrong.entries[0].pre.at("b") <= 0);
  SummaryTable table{{"foo", wrong}};
  CHECK(cover_with(p, "bar", table).uncovered == std::set<std::string>{"l1"});

  const auto& call = std::get<Call>(p.find("bar")->blocks[0].stmts[0]);
  auto constraints = literal_constraints(call, *p.find("foo"));
  REQUIRE(constraints.size() == 1);
  CHECK(to_source(constraints[0]) == "b == 1");
  Summary refined = refine_summary(p, "foo", constraints, Algorithm::Path, 1, test::solver_options(),
                                   {}, summary_mode());
  REQUIRE(refined.entries.size() == 1);
  CHECK(refined.entries[0].pre.at("b") == 1);
  merge_summary(table.at("foo"), refined);
  CHECK(table.at("foo").entries.size() == 2);
  CoverReport after = cover_with(p, "bar", table);
  CHECK(after.uncovered.empty());
  for (const auto& tc : after.test_cases) {
    Lowering low = lower(p, "bar", summary_mode(), &table);
    VcBundle vc = build_reachability_vc(low.passive);
    CHECK(check_replay(p, low, vc, tc, &table).feasible());
  }
}

TEST_CASE("refinement keeps an entry that already satisfies the constraints") {
  Program p = load("summary.sl");
  Summary s = foo_summary(16);
  Summary refined = refine_summary(p, "foo", {parse_expr("b == 1")}, Algorithm::Path, 16,
                                   test::solver_options(), {}, summary_mode());
  REQUIRE_FALSE(refined.entries.empty());
  for (const auto& e : refined.entries) CHECK(e.pre.at("b") == 1);
  Summary merged = s;
  merge_summary(merged, refined);
  CHECK(merged.entries.size() >= s.entries.size());
}

TEST_CASE("summary mode analysis of bar") {
  Program p = load("summary.sl");
  AnalysisConfig c;
  c.entry = "bar";
  c.summaries = true;
  c.cap = 1;
  c.algorithm = Algorithm::Stmt;
  c.solver = test::solver_options();
  AnalysisResult r = analyze_program(p, c);
  CHECK(r.cover.uncovered.empty());
  CHECK(r.all_replays_feasible());
  CHECK(r.refinements.size() <= 1);
  CHECK_FALSE(r.cover.test_cases.empty());
}

TEST_CASE("summary coverage never exceeds inlined coverage") {
  Program p = load("summary.sl");
  for (const char* entry : {"main", "bar"}) {
    AnalysisConfig c;
    c.entry = entry;
    c.solver = test::solver_options();
    AnalysisResult inl = analyze_program(p, c);
    c.summaries = true;
    AnalysisResult sum = analyze_program(p, c);
    for (const auto& l : sum.cover.covered) CHECK(inl.cover.covered.count(l) == 1);
    CHECK(sum.all_replays_feasible());
  }
}

TEST_CASE("recursive procedures see an empty summary on the cycle") {
  Program p = load("recursion.sl");
  SummaryTable t = build_summary_table(p, "main", Algorithm::Stmt, 16, test::solver_options(),
                                       summary_mode());
  CHECK(t.count("main") == 0);
  for (const auto& [name, s] : t) {
    for (const auto& e : s.entries) {
      PathTrace tr = replay_program(p, name, e.witness_inputs, e.witness);
      CHECK(tr.feasible());
    }
  }
}
