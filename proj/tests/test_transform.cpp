#include "doctest.h"
#include "support.hpp"

#include <functional>

#include "covgen/cfg.hpp"
#include "covgen/generator.hpp"
#include "covgen/transform.hpp"

using namespace covgen;
using covgen::test::load;
using covgen::test::program;

namespace {

const char* kSelfLoop =
    "proc main() {\n"
    "  l0: x := x + 1;\n"
    "      goto l0, l1;\n"
    "  l1:\n"
    "}\n";

std::size_t count_if_block(const Cfg& c, const std::function<bool(const Block&)>& pred) {
  std::size_t n = 0;
  for (const auto& b : c.blocks) n += pred(b) ? 1 : 0;
  return n;
}

bool has_assume_false(const Block& b) {
  for (const auto& s : b.stmts) {
    if (const auto* a = std::get_if<Assume>(&s); a && is_false(a->cond)) return true;
  }
  return false;
}

// Left-hand variables of defining equalities "v$i == e".
std::vector<std::string> defined_vars(const Block& b) {
  std::vector<std::string> out;
  for (const auto& s : b.stmts) {
    const auto* a = std::get_if<Assume>(&s);
    if (a && a->cond->op() == Op::Eq && a->cond->arg(0)->op() == Op::Var) {
      out.push_back(a->cond->arg(0)->name());
    }
  }
  return out;
}

void check_single_definition(const Cfg& c) {
  std::vector<std::string> path;
  std::function<void(const std::string&, std::set<std::string>)> walk =
      [&](const std::string& l, std::set<std::string> defined) {
        for (const auto& v : defined_vars(c.block(l))) {
          CHECK_MESSAGE(defined.insert(v).second, "redefined " << v << " at " << l);
        }
        for (const auto& s : c.succs.at(l)) walk(s, defined);
      };
  walk(c.entry, {});
}

}  // namespace

TEST_CASE("normalize_exit with one sink adds an exit alias") {
  Cfg c = normalize_exit(build_cfg(*load("fig2.sl").find("foo")));
  CHECK(c.exit == kExitLabel);
  CHECK(c.block(kExitLabel).stmts.empty());
  CHECK(c.succs.at("l3") == std::set<std::string>{kExitLabel});
  CHECK(c.sinks() == std::vector<std::string>{kExitLabel});
}

TEST_CASE("normalize_exit joins two sinks") {
  Cfg c = normalize_exit(build_cfg(program("proc main() { a: goto b, c; b: x := 1; c: x := 2; }")
                                       .procedures[0]));
  CHECK(c.preds.at(kExitLabel) == std::set<std::string>{"b", "c"});
  CHECK(c.sinks().size() == 1);
}

TEST_CASE("normalize_exit on a pure cycle leaves the exit unreachable") {
  Cfg c = normalize_exit(build_cfg(program("proc main() { l0: goto l0; }").procedures[0]));
  CHECK(c.contains(kExitLabel));
  CHECK(c.preds.at(kExitLabel).empty());
  Cfg u = unwind_loops(c, 1);
  CHECK(u.is_acyclic());
  CHECK_FALSE(u.preds.at(kExitLabel).empty());
}

TEST_CASE("inlining fig2 main") {
  Program p = load("fig2.sl");
  UnwindConfig u;
  Cfg c = inline_calls(p, "main", u);
  for (const char* l : {"l0$i1", "l1$i1", "l2$i1", "l3$i1"}) {
    REQUIRE(c.contains(l));
    CHECK(c.origin.at(l).proc == "foo");
    CHECK(c.origin.at(l).site == 1u);
  }
  // parameter binding before the callee, result binding after it
  const Block& head = c.block("l0");
  REQUIRE(head.stmts.size() == 2);
  CHECK(print_stmt(head.stmts[0]) == "x$i1 := 0;");
  CHECK(print_stmt(head.stmts[1]) == "y$i1 := 1;");
  CHECK(head.succs == std::vector<std::string>{"l0$i1"});
  const Block& resume = c.block("l0$r1");
  REQUIRE(resume.stmts.size() == 1);
  CHECK(print_stmt(resume.stmts[0]) == "r := z$i1;");
  CHECK(c.origin.at("l0$r1").resume);
}

TEST_CASE("inlining a call-free program changes nothing") {
  Program p = load("dead_block.sl");
  Cfg c = inline_calls(p, "main", UnwindConfig{});
  CHECK(c.to_procedure() == p.procedures[0]);
}

TEST_CASE("recursion is cut after max_inline_depth copies") {
  Program p = program(
      "proc f(n) returns r {\n"
      "  a: goto b, c;\n"
      "  b: assume n <= 0; r := 0; goto d;\n"
      "  c: assume n > 0; r := call f(n - 1); goto d;\n"
      "  d:\n"
      "}\n"
      "proc main() { m: x := call f(k); }\n");
  UnwindConfig u;
  u.max_inline_depth = 2;
  Cfg c = inline_calls(p, "main", u);
  std::size_t copies_of_a = 0;
  for (const auto& [label, o] : c.origin) {
    if (o.proc == "f" && o.label == "a") ++copies_of_a;
  }
  CHECK(copies_of_a == 2);
  // the third call site blocks
  CHECK(count_if_block(c, has_assume_false) == 1);
  // main's block, 2 x 4 callee blocks, and one resume block per call split
  std::size_t resumes = count_if_block(c, [&](const Block& b) {
    auto it = c.origin.find(b.label);
    return it != c.origin.end() && it->second.resume;
  });
  CHECK(c.blocks.size() == 1 + 2 * 4 + resumes);
}

TEST_CASE("self-loop unwound once") {
  Cfg c = unwind_loops(normalize_exit(build_cfg(program(kSelfLoop).procedures[0])), 1);
  CHECK(c.is_acyclic());
  REQUIRE(c.contains("l0$u1"));
  CHECK(c.origin.at("l0$u1").label == "l0");
  // l0, its clone and l1 carry origins; the cut-off is synthetic
  std::size_t original = count_if_block(c, [&](const Block& b) {
    return b.label != kExitLabel && c.origin.count(b.label);
  });
  CHECK(original == 3);
  std::size_t cuts = count_if_block(c, has_assume_false);
  CHECK(cuts == 1);
  for (const auto& s : c.succs.at("l0$u1")) {
    if (s != "l1") CHECK(has_assume_false(c.block(s)));
  }
}

TEST_CASE("self-loop with k = 0 keeps only the zero-trip run") {
  Cfg c = unwind_loops(normalize_exit(build_cfg(program(kSelfLoop).procedures[0])), 0);
  CHECK(c.is_acyclic());
  for (const auto& s : c.succs.at("l0")) {
    if (s != "l1") CHECK(has_assume_false(c.block(s)));
  }
}

TEST_CASE("unwinding a loop-free graph is the identity") {
  Cfg c = normalize_exit(build_cfg(*load("fig2.sl").find("foo")));
  Cfg u = unwind_loops(c, 3);
  CHECK(u.to_procedure() == c.to_procedure());
}

TEST_CASE("passify an assignment") {
  Program p = program("proc main() { l0: z := x + y; }");
  Lowering low = lower(p, "main", UnwindConfig{});
  const Block& b = low.passive.cfg.block("l0");
  REQUIRE(b.stmts.size() == 1);
  CHECK(print_stmt(b.stmts[0]) == "assume z$1 == x$0 + y$0;");
  CHECK(low.passive.inputs == std::vector<std::string>{"x$0", "y$0"});
  CHECK(low.passive.last_incarnation.at("z") == 1u);
}

TEST_CASE("passify keeps assume-only blocks") {
  Program p = program("proc main() { l0: assume x > 0; }");
  Lowering low = lower(p, "main", UnwindConfig{});
  CHECK(print_stmt(low.passive.cfg.block("l0").stmts.at(0)) == "assume x$0 > 0;");
}

TEST_CASE("passify fig2 foo unifies z at the join") {
  Program p = load("fig2.sl");
  Lowering low = lower(p, "foo", UnwindConfig{});
  const PassiveProcedure& pp = low.passive;
  auto e1 = pp.edge_block("l1", "l3");
  auto e2 = pp.edge_block("l2", "l3");
  REQUIRE(e1);
  REQUIRE(e2);
  CHECK(print_stmt(pp.cfg.block(*e1).stmts.at(0)) == "assume z$3 == z$1;");
  CHECK(print_stmt(pp.cfg.block(*e2).stmts.at(0)) == "assume z$3 == z$2;");
  CHECK(pp.entry_incarnation.at("l3").at("z") == 3u);
  CHECK(pp.last_incarnation.at("z") == 3u);
}

TEST_CASE("lowering invariants on generated programs") {
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    GenConfig g;
    g.diamonds = 2 + static_cast<unsigned>(seed % 2);
    g.seed = seed;
    g.loops = static_cast<unsigned>(seed % 3);
    Program p = program(gen_program(g));
    for (unsigned k = 0; k <= 3; ++k) {
      UnwindConfig u;
      u.k = k;
      Lowering low = lower(p, "main", u);
      CHECK(low.unwound.is_acyclic());
      CHECK(low.passive.cfg.is_acyclic());
      for (const auto& b : low.passive.cfg.blocks) {
        for (const auto& s : b.stmts) CHECK(std::holds_alternative<Assume>(s));
      }
      if (g.loops == 0 || k <= 1) check_single_definition(low.passive.cfg);
    }
  }
}

TEST_CASE("incarnations never decrease through a block") {
  GenConfig g;
  g.diamonds = 3;
  g.seed = 77;
  Lowering low = lower(program(gen_program(g)), "main", UnwindConfig{});
  for (const auto& [label, entry] : low.passive.entry_incarnation) {
    const auto& exit = low.passive.exit_incarnation.at(label);
    for (const auto& [v, i] : entry) CHECK(exit.at(v) >= i);
  }
}

TEST_CASE("original steps drop synthetic blocks") {
  Program p = load("fig2.sl");
  Lowering low = lower(p, "main", UnwindConfig{});
  auto steps = original_steps({"l0", "l0$i1", "l1$i1", "$el1$i1_l3$i1", "l3$i1", "l0$r1", "$exit"},
                              low.passive.cfg.origin);
  std::vector<Step> want{{"main", "l0", 0}, {"foo", "l0", 1}, {"foo", "l1", 1}, {"foo", "l3", 1}};
  CHECK(steps == want);
}
