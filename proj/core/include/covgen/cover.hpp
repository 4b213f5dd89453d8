#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "covgen/solver.hpp"
#include "covgen/vcgen.hpp"

namespace covgen {

enum class Algorithm : int { Path, Stmt, Fm };

std::string to_string(Algorithm a);
/// "path", "stmt" or "fm"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(const std::string& s);

struct TestCase {
  std::map<std::string, Int> inputs;        // input incarnations, e.g. "x$0"
  std::map<std::string, bool> r_valuation;  // block label -> R value
  std::vector<std::string> witness_path;    // entry to exit, over vc.blocks
  std::map<std::string, Int> outputs;       // last incarnations of visible variables
  std::string source;                       // algorithm and round, e.g. "stmt#2"

  std::vector<std::string> r_true() const;
  bool operator==(const TestCase&) const = default;
};

struct CoverReport {
  Algorithm algorithm = Algorithm::Stmt;
  std::vector<TestCase> test_cases;
  std::set<std::string> reached;    // transformed labels with R true in some model
  std::set<std::string> covered;    // original labels of the analysed procedure
  std::set<std::string> uncovered;
  SolverStats stats;
  bool incomplete = false;          // stopped on a timeout or unknown answer
};

struct CoverOptions {
  bool fm_reuse = false;  // skip fm queries for blocks an earlier model reached
};

CoverReport path_cover(const VcBundle& vc, SolverSession& s);
CoverReport stmt_cover(const VcBundle& vc, SolverSession& s);
/// One query per block except $exit, in topological order. With `reuse`,
/// blocks reached by an earlier model are skipped.
CoverReport fm_cover(const VcBundle& vc, SolverSession& s, bool reuse = false);

/// Opens a session with `options` and runs `algo`.
CoverReport run_cover(Algorithm algo, const VcBundle& vc, const SolverOptions& options,
                      const CoverOptions& cover = {});

/// Removes `label` and every block with the same origin from `uncovered`.
void remove_double(const std::string& label, std::set<std::string>& uncovered,
                   const OriginMap& origin);

/// Follows B-true successors (through true edge guards) from the entry,
/// taking the smallest label on ties. Throws InternalError on a dead end.
std::vector<std::string> extract_path(const VcBundle& vc, const Model& model);

TestCase decode_test_case(const VcBundle& vc, const Model& model, std::string source);

/// Original labels whose block (or a clone of it) is in `labels`.
std::set<std::string> collapse_labels(const VcBundle& vc, const std::set<std::string>& labels);

}  // namespace covgen
