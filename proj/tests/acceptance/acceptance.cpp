// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. `--only 1,4` runs a subset.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covgen/analysis.hpp"
#include "covgen/bench.hpp"
#include "covgen/cover.hpp"
#include "covgen/exec.hpp"
#include "covgen/generator.hpp"
#include "covgen/summaries.hpp"
#include "covgen/vcgen.hpp"
#include "support.hpp"

using namespace covgen;

namespace {

// Tolerances and sample sizes.
constexpr std::size_t kOraclePrograms = 50;      // criterion 1, 2..4 diamonds
constexpr std::size_t kCompletenessPrograms = 20;  // criterion 2, <= 3 diamonds
constexpr std::size_t kMaxCompletenessPaths = 64;
constexpr std::size_t kSoundnessPrograms = 10;   // per kind (loop-free, loopy)
constexpr unsigned kMaxK = 3;
constexpr std::size_t kFig2PathCases = 2;
constexpr std::size_t kFig2StmtQueries = 3;
constexpr std::size_t kSummaryEntries = 2;
constexpr unsigned kRefinementRounds = 1;
constexpr unsigned kSweepMin = 2, kSweepMax = 9, kSweepPer = 10;
constexpr std::size_t kStmtQueryLimit = 20;
constexpr std::size_t kMonotonePrograms = 20;
constexpr std::size_t kMinModelChecks = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Evidence shared by criteria 8 and 9, gathered from every run.
struct Ledger {
  std::size_t path_runs = 0;
  std::size_t path_cases = 0;
  std::vector<std::string> duplicate_runs;
  SolverStats stats;

  void record(const CoverReport& r, const std::string& where) {
    stats += r.stats;
    if (r.algorithm != Algorithm::Path) return;
    ++path_runs;
    path_cases += r.test_cases.size();
    std::set<std::map<std::string, bool>> seen;
    for (const auto& tc : r.test_cases) {
      if (!seen.insert(tc.r_valuation).second) {
        duplicate_runs.push_back(where);
        break;
      }
    }
  }
};

Ledger ledger;

SolverOptions solver() { return test::solver_options(); }

Program generated(unsigned diamonds, std::uint64_t seed, unsigned loops = 0) {
  GenConfig g;
  g.diamonds = diamonds;
  g.seed = seed;
  g.loops = loops;
  return test::program(gen_program(g));
}

OracleResult run_oracle(const Cfg& graph) {
  SolverSession s(logic_for(solver(), is_nonlinear(graph)));
  OracleResult r = enumerate_paths_oracle(graph, s);
  ledger.stats += s.stats();
  return r;
}

AnalysisResult analyze(const Program& p, Algorithm a, unsigned k, const std::string& where) {
  AnalysisConfig c;
  c.algorithm = a;
  c.k = k;
  c.solver = solver();
  AnalysisResult r = analyze_program(p, c);
  ledger.record(r.cover, where);
  return r;
}

std::string join(const std::vector<std::string>& xs, std::size_t limit = 5) {
  std::string out;
  for (std::size_t i = 0; i < xs.size() && i < limit; ++i) out += (i ? " " : "") + xs[i];
  if (xs.size() > limit) out += " ...";
  return out;
}

Outcome oracle_equivalence() {
  std::vector<std::string> bad;
  std::size_t incomplete = 0;
  for (std::size_t i = 0; i < kOraclePrograms; ++i) {
    const unsigned d = 2 + static_cast<unsigned>(i % 3);
    Program p = generated(d, 1000 + i);
    Lowering low = lower(p, "main", UnwindConfig{});
    VcBundle vc = build_reachability_vc(low.passive);
    CoverReport stmt = run_cover(Algorithm::Stmt, vc, solver());
    ledger.record(stmt, "c1");
    OracleResult o = run_oracle(low.unwound);
    if (stmt.incomplete || o.incomplete) ++incomplete;
    if (stmt.covered != collapse_labels(vc, o.feasible_block_union)) bad.push_back(std::to_string(1000 + i));
  }
  return {bad.empty() && incomplete == 0,
          std::to_string(kOraclePrograms - bad.size()) + "/" + std::to_string(kOraclePrograms) +
              " programs equal" + (bad.empty() ? "" : "; differ at seeds " + join(bad)) +
              (incomplete ? "; " + std::to_string(incomplete) + " incomplete" : "")};
}

Outcome path_completeness() {
  std::size_t checked = 0, paths = 0, missing = 0;
  for (std::uint64_t seed = 2000; checked < kCompletenessPrograms; ++seed) {
    const unsigned d = 2 + static_cast<unsigned>(seed % 2);
    Program p = generated(d, seed);
    Lowering low = lower(p, "main", UnwindConfig{});
    if (count_paths(low.unwound, kMaxCompletenessPaths + 1) > kMaxCompletenessPaths) continue;
    ++checked;
    VcBundle vc = build_reachability_vc(low.passive);
    CoverReport r = run_cover(Algorithm::Path, vc, solver());
    ledger.record(r, "c2 seed " + std::to_string(seed));
    if (r.incomplete) ++missing;
    for (const auto& op : run_oracle(low.unwound).paths) {
      if (!op.feasible) continue;
      ++paths;
      bool found = false;
      for (const auto& tc : r.test_cases) {
        bool all = true;
        for (const auto& l : op.path) all = all && tc.r_valuation.at(l);
        found = found || all;
      }
      missing += found ? 0 : 1;
    }
  }
  return {missing == 0, std::to_string(paths - missing) + "/" + std::to_string(paths) +
                            " feasible paths covered over " + std::to_string(checked) + " programs"};
}

Outcome soundness() {
  std::size_t cases = 0;
  std::vector<std::string> failures;
  auto check = [&](const Program& p, const std::string& name, unsigned k) {
    for (Algorithm a : {Algorithm::Path, Algorithm::Stmt, Algorithm::Fm}) {
      const std::string where = name + " k=" + std::to_string(k) + " " + to_string(a);
      AnalysisResult r = analyze(p, a, k, where);
      for (const auto& rc : r.replays) {
        ++cases;
        if (!rc.feasible()) failures.push_back(where + " (" + rc.detail + ")");
      }
    }
  };
  for (std::size_t i = 0; i < kSoundnessPrograms; ++i) {
    const unsigned d = 2 + static_cast<unsigned>(i % 2);
    const std::uint64_t seed = 3000 + i;
    Program flat = generated(d, seed);
    Program loopy = generated(d, seed, 1 + static_cast<unsigned>(i % 2));
    for (unsigned k = 0; k <= kMaxK; ++k) {
      check(flat, "flat " + std::to_string(seed), k);
      check(loopy, "loopy " + std::to_string(seed), k);
    }
  }
  for (const char* f : {"fig2.sl", "loop.sl", "recursion.sl", "summary.sl", "dead_block.sl"}) {
    for (unsigned k = 0; k <= kMaxK; ++k) check(test::load(f), f, k);
  }
  return {failures.empty() && cases > 0,
          std::to_string(cases - failures.size()) + "/" + std::to_string(cases) +
              " test cases replay feasibly" + (failures.empty() ? "" : "; " + join(failures, 3))};
}

Outcome fig2_golden() {
  Program p = test::load("fig2.sl");
  UnwindConfig u;
  u.k = 0;
  Lowering low = lower(p, "foo", u);
  VcBundle vc = build_reachability_vc(low.passive);
  CoverReport path = run_cover(Algorithm::Path, vc, solver());
  ledger.record(path, "fig2 path");
  CoverReport stmt = run_cover(Algorithm::Stmt, vc, solver());
  ledger.record(stmt, "fig2 stmt");
  std::size_t feasible = 0;
  for (const auto& op : run_oracle(low.unwound).paths) feasible += op.feasible ? 1 : 0;
  const std::set<std::string> all{"l0", "l1", "l2", "l3"};
  const bool ok = path.test_cases.size() == kFig2PathCases && feasible == kFig2PathCases &&
                  path.covered == all && stmt.covered == all &&
                  stmt.stats.queries <= kFig2StmtQueries;
  std::ostringstream os;
  os << "path " << path.test_cases.size() << " test cases (oracle " << feasible << " feasible paths), "
     << path.covered.size() << "/4 blocks; stmt " << stmt.stats.queries << " checksat calls, "
     << stmt.covered.size() << "/4 blocks";
  return {ok, os.str()};
}

Outcome summary_pipeline() {
  Program p = test::load("summary.sl");
  UnwindConfig u;
  u.mode = CallMode::UseSummaries;
  std::vector<std::string> problems;

  Summary sum = build_summary(p, "foo", Algorithm::Path, 16, solver(), {}, u);
  if (sum.entries.size() != kSummaryEntries) problems.push_back(std::to_string(sum.entries.size()) + " entries");
  for (const auto& e : sum.entries) {
    const Int a = e.pre.at("a"), b = e.pre.at("b"), c = e.post.at("c");
    const bool ok = (b >= 1 && c == a + 1) || (b <= 0 && c == a - 1);
    if (!ok) problems.push_back("entry a=" + a.str() + " b=" + b.str() + " c=" + c.str());
  }

  auto cover_bar = [&](const SummaryTable& table) {
    Lowering low = lower(p, "bar", u, &table);
    VcBundle vc = build_reachability_vc(low.passive);
    CoverReport r = run_cover(Algorithm::Stmt, vc, solver());
    ledger.record(r, "bar");
    std::size_t replayed = 0;
    for (const auto& tc : r.test_cases) replayed += check_replay(p, low, vc, tc, &table).feasible() ? 1 : 0;
    return std::make_pair(r, replayed);
  };
  auto [bar, replayed] = cover_bar({{"foo", sum}});
  if (bar.test_cases.empty() || replayed != bar.test_cases.size()) {
    problems.push_back("bar: " + std::to_string(replayed) + "/" + std::to_string(bar.test_cases.size()) +
                       " replay-feasible");
  }

  // cap 1 with an entry whose b contradicts bar's argument
  SummaryTable table{{"foo", build_summary(p, "foo", Algorithm::Path, 1, solver(), {}, u, {parse_expr("b <= 0")})}};
  const bool blocked = !cover_bar(table).first.uncovered.empty();
  unsigned rounds = 0;
  bool restored = false;
  const auto& call = std::get<Call>(p.find("bar")->blocks[0].stmts[0]);
  while (!restored && rounds < kRefinementRounds) {
    ++rounds;
    merge_summary(table.at("foo"), refine_summary(p, "foo", literal_constraints(call, *p.find("foo")),
                                                  Algorithm::Path, 1, solver(), {}, u));
    auto [after, ok] = cover_bar(table);
    restored = after.uncovered.empty() && ok == after.test_cases.size();
  }
  if (!blocked) problems.push_back("wrong entry did not block bar");
  if (!restored) problems.push_back("refinement did not restore coverage");

  std::ostringstream os;
  os << sum.entries.size() << " summary entries; bar " << replayed << "/" << bar.test_cases.size()
     << " replay-feasible; refinement restored coverage in " << rounds << " round(s)";
  if (!problems.empty()) os << "; " << join(problems);
  return {problems.empty(), os.str()};
}

Outcome query_counts() {
  std::map<Algorithm, std::size_t> total;
  std::size_t max_stmt = 0, flagged = 0, fm_mismatch = 0, disagreements = 0;
  std::map<unsigned, std::map<Algorithm, std::size_t>> per_d;
  const auto algos = {Algorithm::Path, Algorithm::Stmt, Algorithm::Fm};
  for (unsigned d = kSweepMin; d <= kSweepMax; ++d) {
    for (unsigned i = 0; i < kSweepPer; ++i) {
      GenConfig g;
      g.diamonds = d;
      g.seed = program_seed(1, d, i);
      const std::string id = "d" + std::to_string(d) + "_" + std::to_string(i);
      std::vector<CoverReport> reports;
      auto rows = bench_program(id, g, algos, solver(), 1, &reports);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& row = rows[j];
        ledger.record(reports[j], id);
        flagged += row.flagged ? 1 : 0;
        total[row.algo] += row.queries;
        per_d[d][row.algo] += row.queries;
        if (row.algo == Algorithm::Stmt) max_stmt = std::max(max_stmt, row.queries);
        if (row.algo == Algorithm::Fm && row.queries != row.blocks) ++fm_mismatch;
        if (row.covered_set != rows.front().covered_set) ++disagreements;
      }
    }
    std::printf("  d=%u mean queries: path %.1f, stmt %.1f, fm %.1f\n", d,
                per_d[d][Algorithm::Path] / double(kSweepPer), per_d[d][Algorithm::Stmt] / double(kSweepPer),
                per_d[d][Algorithm::Fm] / double(kSweepPer));
    std::fflush(stdout);
  }
  const std::size_t path = total[Algorithm::Path], fm = total[Algorithm::Fm], stmt = total[Algorithm::Stmt];
  const bool a = max_stmt <= kStmtQueryLimit, b = fm_mismatch == 0, c = path > fm && fm > stmt;
  std::ostringstream os;
  os << "(a) max stmt queries " << max_stmt << " (limit " << kStmtQueryLimit << ") " << (a ? "ok" : "violated")
     << "; (b) fm rows off one-per-block: " << fm_mismatch << "; (c) totals path " << path << " > fm " << fm
     << " > stmt " << stmt << " " << (c ? "ok" : "violated");
  if (flagged) os << "; " << flagged << " rows timed out";
  if (disagreements) os << "; " << disagreements << " covered-set disagreements";
  return {a && b && c && flagged == 0 && disagreements == 0, os.str()};
}

Outcome coverage_monotone() {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < kMonotonePrograms; ++i) {
    const std::uint64_t seed = 7000 + i;
    Program p = generated(2 + static_cast<unsigned>(i % 2), seed, 1 + static_cast<unsigned>(i % 2));
    std::vector<std::set<std::string>> covered;
    for (unsigned k = 0; k <= kMaxK; ++k) {
      covered.push_back(analyze(p, Algorithm::Stmt, k, "c7 " + std::to_string(seed)).cover.covered);
    }
    for (unsigned k = 0; k < kMaxK; ++k) {
      for (const auto& l : covered[k]) {
        if (!covered[k + 1].count(l)) {
          bad.push_back(std::to_string(seed) + " k=" + std::to_string(k) + " " + l);
          break;
        }
      }
    }
  }
  return {bad.empty(), std::to_string(kMonotonePrograms) + " loopy programs, k = 0.." +
                           std::to_string(kMaxK) + (bad.empty() ? ", all nested" : "; not nested: " + join(bad))};
}

Outcome blocking_progress() {
  return {ledger.duplicate_runs.empty() && ledger.path_runs > 0,
          std::to_string(ledger.path_runs) + " path_cover runs, " + std::to_string(ledger.path_cases) +
              " test cases, " + std::to_string(ledger.duplicate_runs.size()) + " runs with a repeated R-valuation" +
              (ledger.duplicate_runs.empty() ? "" : " (" + join(ledger.duplicate_runs) + ")")};
}

Outcome model_round_trip() {
  const auto& s = ledger.stats;
  return {s.model_check_failures == 0 && s.model_checks >= kMinModelChecks,
          std::to_string(s.model_checks - s.model_check_failures) + "/" + std::to_string(s.model_checks) +
              " models satisfy every active assertion (minimum " + std::to_string(kMinModelChecks) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covgen acceptance suite"};
  std::vector<int> only;
  std::string results;
  app.add_option("--only", only, "Criteria to run")->delimiter(',');
  app.add_option("--results", results, "Also write the verdict lines to this file");
  CLI11_PARSE(app, argc, argv);
  std::ofstream out;
  if (!results.empty()) out.open(results);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"path completeness", path_completeness},
      {"replay soundness", soundness},
      {"fig2 golden", fig2_golden},
      {"summary pipeline", summary_pipeline},
      {"query counts", query_counts},
      {"coverage monotone in k", coverage_monotone},
      {"blocking-clause progress", blocking_progress},
      {"model round trip", model_round_trip},
  };
  std::cout << "solver: " << solver().command << "\n";
  if (out) out << "solver: " << solver().command << "\n";
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    char line[64];
    std::snprintf(line, sizeof line, " [%.1f s]", secs);
    const std::string verdict = "criterion " + std::to_string(n) + (o.pass ? " PASS: " : " FAIL: ") +
                                criteria[i].first + " (" + o.detail + ")" + line;
    std::cout << verdict << std::endl;
    if (out) out << verdict << std::endl;
  }
  return failed;
}
