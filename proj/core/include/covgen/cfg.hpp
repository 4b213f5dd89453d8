#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "covgen/ast.hpp"

namespace covgen {

/// Where a block of a transformed procedure came from. `site` is the inline
/// instance (0 for the analysed procedure itself); `resume` marks the second
/// half of a block that was split at a call.
struct Origin {
  std::string proc;
  std::string label;
  unsigned site = 0;
  bool resume = false;

  auto operator<=>(const Origin&) const = default;
};

using OriginMap = std::map<std::string, Origin>;

struct Loop {
  std::string header;
  std::set<std::string> body;  // includes the header
  std::set<std::string> latches;
};

/// A procedure's blocks plus derived control-flow facts. Synthetic blocks
/// (exit, unwinding cut-offs, passification edge blocks) have no origin.
struct Cfg {
  std::string proc;
  std::vector<std::string> params;
  std::optional<std::string> returns;

  std::vector<Block> blocks;  // blocks[0] is the entry
  std::string entry;
  std::string exit;  // unique sink, empty while there is none or several
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::set<std::string>> preds;
  std::map<std::string, std::set<std::string>> succs;
  std::vector<std::pair<std::string, std::string>> back_edges;
  std::vector<Loop> loops;
  OriginMap origin;

  const Block& block(const std::string& label) const;
  Block& block(const std::string& label);
  bool contains(const std::string& label) const { return index.count(label) > 0; }
  std::vector<std::string> sinks() const;
  std::vector<std::string> labels() const;
  std::size_t edge_count() const;

  /// Recomputes index, preds/succs, dominance-based loop structure. Throws
  /// CfgError on irreducible control flow.
  void analyze();

  /// Topological order of an acyclic graph; ties follow block order.
  std::vector<std::string> topological_order() const;
  bool is_acyclic() const;

  Procedure to_procedure() const;
};

/// Builds the control-flow graph of a checked procedure, verifying
/// reducibility (every retreating edge targets a dominator of its source).
Cfg build_cfg(const Procedure& proc);

/// Immediate dominators over the graph rooted at the entry; blocks not
/// reachable from the entry are treated as further roots in block order.
std::map<std::string, std::string> immediate_dominators(const Cfg& cfg);

}  // namespace covgen
