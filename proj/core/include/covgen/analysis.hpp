#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "covgen/cover.hpp"
#include "covgen/summaries.hpp"
#include "covgen/transform.hpp"

namespace covgen {

struct AnalysisConfig {
  std::string input;  // source path, echoed in the report
  std::string entry = "main";
  Algorithm algorithm = Algorithm::Stmt;
  unsigned k = 1;
  unsigned max_inline_depth = 2;
  bool summaries = false;
  std::size_t cap = 16;
  unsigned rounds = 3;  // summary refinement rounds
  bool fm_reuse = false;
  SolverOptions solver;
  std::string output;
  bool dump_passive = false;
  bool dump_vc = false;

  bool operator==(const AnalysisConfig&) const;
};

/// Replay verdict of one test case on the unwound graph and on the
/// original program.
struct ReplayCheck {
  bool unwound = false;
  bool original = false;
  std::string detail;  // first failure, empty when both hold

  bool feasible() const { return unwound && original; }
};

struct AnalysisResult {
  Lowering lowering;
  VcBundle vc;
  CoverReport cover;
  std::vector<ReplayCheck> replays;  // parallel to cover.test_cases
  SummaryTable summaries;            // summary mode only
  std::vector<RefinementLog> refinements;

  bool all_replays_feasible() const;
  /// 0 full coverage, 1 uncovered blocks, 2 replay failure, 3 incomplete.
  int exit_code() const;
};

/// Replays `tc` on the unwound graph and on `program`.
ReplayCheck check_replay(const Program& program, const Lowering& lowering, const VcBundle& vc,
                         const TestCase& tc, const SummaryTable* summaries = nullptr);

/// Lowers `entry`, runs the configured algorithm, validates every test case
/// by replay and, in summary mode, refines summaries of constant-argument
/// call sites in blocks left uncovered. `program` must be checked.
AnalysisResult analyze_program(const Program& program, const AnalysisConfig& config);

/// Lowering of `entry` under `config` (no solver involved).
Lowering lower_for(const Program& program, const AnalysisConfig& config,
                   const SummaryTable* summaries = nullptr);

}  // namespace covgen
