#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "covgen/ast.hpp"
#include "covgen/transform.hpp"

namespace covgen {

/// wlp(stmts, post) for assume/assignment sequences:
///   wlp(assume E, Q) = E => Q,  wlp(v := e, Q) = Q[v/e],
///   wlp(S; T, Q) = wlp(S, wlp(T, Q)).
/// Throws InternalError on a call statement.
ExprPtr wlp_stmts(std::span<const Stmt> stmts, ExprPtr post);

/// Reachability verification condition of a passive procedure.
///
/// Only ordinary blocks get B/R variables; passification edge blocks are
/// folded into the edge they sit on: with A_i the conjunction of block i's
/// assumptions and E_ij the conjunction of the edge block's equalities (true
/// when there is none),
///   B_i <=> A_i && OR_{j in succ(i)} (E_ij && B_j)        (B_exit <=> A_exit)
///   R_0 <=> B_0,   R_j <=> B_j && OR_{i in pred(j)} (R_i && E_ij).
struct VcBundle {
  ExprPtr wlp;  // conjunction of the B definitions
  ExprPtr vc;   // wlp plus the R definitions
  std::map<std::string, std::string> block_vars;  // label -> B variable
  std::map<std::string, std::string> reach_vars;  // label -> R variable
  std::string entry;
  std::string exit;
  std::string entry_reach;
  std::vector<std::string> blocks;  // topological order (edge blocks excluded)
  std::map<std::string, std::vector<std::string>> succs;  // over `blocks`
  std::map<std::string, std::vector<std::string>> preds;
  std::map<std::pair<std::string, std::string>, ExprPtr> edge_guard;  // E_ij
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  // last incarnations of visible variables
  std::map<std::string, Sort> variables;  // every variable of `vc`
  OriginMap origin;
  std::string proc;
  std::set<std::string> original_labels;

  const std::string& reach(const std::string& label) const { return reach_vars.at(label); }
  const std::string& block_var(const std::string& label) const { return block_vars.at(label); }
  /// Reachability variables sorted by block order.
  std::vector<std::string> reach_list() const;
};

struct WlpConjunction {
  ExprPtr formula;
  std::map<std::string, std::string> block_vars;
};

WlpConjunction build_wlp_conjunction(const PassiveProcedure& p);
VcBundle build_reachability_vc(const PassiveProcedure& p);

/// SMT-LIB 2 script: one declare-fun per variable and a single assert.
std::string vc_to_smtlib(const VcBundle& vc, const std::string& logic = "QF_LIA");

}  // namespace covgen
