#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covgen/ast.hpp"
#include "covgen/cfg.hpp"
#include "covgen/solver.hpp"
#include "covgen/transform.hpp"

namespace covgen {

using State = std::map<std::string, Int>;

enum class Verdict { Feasible, Blocked };

struct PathTrace {
  std::vector<std::string> path;  // executed blocks, callee blocks included
  std::vector<State> states;      // variable values on entry to each block
  Verdict verdict = Verdict::Feasible;
  std::string blocked_proc;
  std::string blocked_label;
  std::size_t blocked_stmt = 0;
  State final_state;              // entry frame at the end of the run

  bool feasible() const { return verdict == Verdict::Feasible; }
};

/// A run of a callee that stands in for a call in summary mode.
struct CallWitness {
  std::vector<Step> steps;  // callee frame at site 0
  State inputs;             // values of variables read before written
};
/// Returns a witness for `callee(args)` or nullopt when none is known.
using CallResolver =
    std::function<std::optional<CallWitness>(const std::string& callee, const std::vector<Int>& args)>;

/// Replays `path` through a call-free procedure. Variables read before they
/// are written take their value from `inputs`.
PathTrace replay_path(const Procedure& proc, const State& inputs,
                      const std::vector<std::string>& path);

/// Replays a whole-program run given as steps. The frame of inline site n
/// reads unbound variable v from inputs["v$i<n>"] (plain "v" for the entry
/// frame). With a resolver, calls run the resolver's witness instead of
/// consuming callee steps.
PathTrace replay_program(const Program& program, const std::string& entry, const State& inputs,
                         const std::vector<Step>& steps, const CallResolver* resolver = nullptr);

/// Turns a model's input incarnations ("x$0", "v$i2$0") into replay inputs
/// ("x", "v$i2").
State replay_inputs(const std::map<std::string, Int>& incarnations);

struct OraclePath {
  std::vector<std::string> path;
  bool feasible = false;
  State inputs;  // replay inputs from the path's model when feasible
};

struct OracleResult {
  std::vector<OraclePath> paths;
  std::set<std::string> feasible_block_union;
  std::size_t path_count = 0;
  bool incomplete = false;  // a path query timed out
};

/// Number of entry-to-sink paths of an acyclic graph, saturating at `cap`.
std::size_t count_paths(const Cfg& cfg, std::size_t cap);

/// True when some statement of `cfg` multiplies two variables.
bool is_nonlinear(const Cfg& cfg);

/// Classifies every complete path of an acyclic, call-free graph with one
/// solver query per path (satisfiability of not wlp(path, false)).
OracleResult enumerate_paths_oracle(const Cfg& cfg, SolverSession& s,
                                    std::size_t max_paths = std::size_t{1} << 20);

}  // namespace covgen
