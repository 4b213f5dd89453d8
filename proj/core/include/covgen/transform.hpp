#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covgen/ast.hpp"
#include "covgen/cfg.hpp"

namespace covgen {

struct Summary;
using SummaryTable = std::map<std::string, Summary>;

enum class CallMode { InlineAll, UseSummaries };

struct UnwindConfig {
  unsigned k = 1;                 // loop unwindings
  unsigned max_inline_depth = 2;  // copies of a procedure on one inline chain
  CallMode mode = CallMode::InlineAll;
};

inline constexpr const char* kExitLabel = "$exit";

/// Fresh-name helpers shared by the passes and the interpreter.
std::string incarnation_name(const std::string& base, unsigned index);
/// Splits "x$3" into ("x", 3); nullopt when the name has no numeric suffix.
std::optional<std::pair<std::string, unsigned>> split_incarnation(const std::string& name);
std::string inlined_var(const std::string& var, unsigned site);

/// Adds the statement-free sink `$exit` and routes every former sink to it.
Cfg normalize_exit(Cfg cfg);

/// Replaces every call reachable from `entry` by the callee body (renamed
/// apart) or, in summary mode, by the callee's summary. A procedure that
/// already occurs `max_inline_depth` times on the current inline chain is
/// cut off with `assume false`. The returned graph carries origins for every
/// block.
Cfg inline_calls(const Program& program, const std::string& entry,
                 const UnwindConfig& config, const SummaryTable* summaries = nullptr);

/// Replacement statements for a call site under a summary (see summaries.hpp).
std::vector<Stmt> substitute_call(const Call& call, const Summary& summary, unsigned site);

/// k-bounded unwinding of all natural loops, innermost first. The last
/// copy's back-edges go to a fresh `assume false` block that continues to
/// the loop's first exit target (or `$exit`).
Cfg unwind_loops(Cfg cfg, unsigned k);

struct EdgeBlock {
  std::string from;
  std::string to;
};

/// Loop-free, assume-only procedure over incarnation variables `v$i`.
struct PassiveProcedure {
  Cfg cfg;  // includes edge blocks
  std::map<std::string, EdgeBlock> edge_blocks;
  std::vector<std::string> inputs;  // incarnation-0 variables that are read
  std::map<std::string, unsigned> last_incarnation;  // at the exit block
  std::map<std::string, std::map<std::string, unsigned>> entry_incarnation;
  std::map<std::string, std::map<std::string, unsigned>> exit_incarnation;
  std::optional<std::string> result_var;
  std::set<std::string> original_labels;  // blocks of the analysed procedure

  /// Label of the edge block on from -> to, if one was inserted.
  std::optional<std::string> edge_block(const std::string& from, const std::string& to) const;
};

/// SSA-based passification of an acyclic, call-free graph with a unique exit.
PassiveProcedure passify(const Cfg& cfg);

/// Full pipeline for one entry procedure: inline/summarise, normalise the
/// exit, unwind, passify.
struct Lowering {
  Cfg unwound;  // loop-free, call-free, not yet passive
  PassiveProcedure passive;
};
Lowering lower(const Program& program, const std::string& entry,
               const UnwindConfig& config, const SummaryTable* summaries = nullptr);

/// Maps a witness path of a transformed graph back to steps over the
/// original program (drops synthetic and resume blocks).
struct Step {
  std::string proc;
  std::string label;
  unsigned site = 0;

  bool operator==(const Step&) const = default;
};
std::vector<Step> original_steps(const std::vector<std::string>& path, const OriginMap& origin);

}  // namespace covgen
