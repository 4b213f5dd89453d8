#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covgen/ast.hpp"
#include "covgen/exec.hpp"
#include "covgen/transform.hpp"

namespace covgen {

struct SolverOptions;
enum class Algorithm;

/// One observed input/output pair of a procedure, together with the run
/// that produced it so callers can replay through the real body.
struct SummaryEntry {
  std::map<std::string, Int> pre;   // every parameter, at incarnation 0
  std::map<std::string, Int> post;  // visible variables, at the last incarnation
  std::vector<Step> witness;        // original steps of the callee run
  std::map<std::string, Int> witness_inputs;

  bool operator==(const SummaryEntry&) const = default;
};

/// Under-approximation of a procedure as a disjunction of concrete
/// input/output pairs over its parameters and return variable.
struct Summary {
  std::string proc;
  std::vector<std::string> params;
  std::optional<std::string> returns;
  std::vector<std::string> visible;  // params, then the return variable
  std::vector<SummaryEntry> entries;
  std::size_t max_entries = 16;

  bool operator==(const Summary&) const = default;
};

/// The disjunction over entries. `param_var`/`result_var` name the terms
/// standing for a parameter's entry value and the returned value.
ExprPtr summary_formula(const Summary& summary,
                        const std::function<ExprPtr(const std::string&)>& param_var,
                        const std::function<ExprPtr()>& result_var);

struct SummaryOptions {
  std::size_t cap = 16;
  unsigned max_refinement_rounds = 3;
  UnwindConfig unwind;
};

struct RefinementLog {
  std::string callee;
  std::string caller_block;
  std::vector<std::string> constraints;
  std::size_t new_entries = 0;
};

/// Analyses `proc` in isolation with the given covering algorithm and turns
/// each replay-validated test case into an entry (deduplicated by `pre`,
/// truncated to `cap`). Calls inside `proc` use `table`. `pre_constraints`
/// are assumed at the start of the entry block.
Summary build_summary(const Program& program, const std::string& proc, Algorithm algo,
                      std::size_t cap, const SolverOptions& solver,
                      const SummaryTable& table, const UnwindConfig& unwind,
                      const std::vector<ExprPtr>& pre_constraints = {});

/// Rebuilds the callee's summary under `pre_constraints` (equalities between
/// parameters and constant call arguments).
Summary refine_summary(const Program& program, const std::string& callee,
                       const std::vector<ExprPtr>& pre_constraints, Algorithm algo,
                       std::size_t cap, const SolverOptions& solver,
                       const SummaryTable& table, const UnwindConfig& unwind);

/// Builds summaries for every procedure reachable from `entry` (callees
/// first). Procedures on a recursive cycle see an empty summary for the
/// calls that close the cycle.
SummaryTable build_summary_table(const Program& program, const std::string& entry,
                                 Algorithm algo, std::size_t cap,
                                 const SolverOptions& solver, const UnwindConfig& unwind);

/// Adds entries from `extra` to `base` (deduplicated by `pre`).
void merge_summary(Summary& base, const Summary& extra);

/// Resolves calls through the table: the entry whose `pre` equals the
/// arguments supplies the witness run. The table must outlive the resolver.
CallResolver summary_resolver(const SummaryTable& table);

/// Literal-argument constraints for a call site, over the callee's params.
std::vector<ExprPtr> literal_constraints(const Call& call, const Procedure& callee);

}  // namespace covgen
