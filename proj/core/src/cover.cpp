#include "covgen/cover.hpp"

#include <stdexcept>

#include "covgen/error.hpp"

namespace covgen {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Path: return "path";
    case Algorithm::Stmt: return "stmt";
    case Algorithm::Fm: return "fm";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "path") return Algorithm::Path;
  if (s == "stmt") return Algorithm::Stmt;
  if (s == "fm") return Algorithm::Fm;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected path, stmt or fm)");
}

std::vector<std::string> TestCase::r_true() const {
  std::vector<std::string> out;
  for (const auto& [label, v] : r_valuation) {
    if (v) out.push_back(label);
  }
  return out;
}

namespace {

bool model_bool(const Model& m, const std::string& name) {
  auto it = m.find(name);
  if (it == m.end()) throw InternalError("model lacks " + name);
  return std::get<bool>(it->second);
}

std::vector<std::string> wanted_vars(const VcBundle& vc) {
  std::vector<std::string> out;
  for (const auto& [name, sort] : vc.variables) out.push_back(name);
  return out;
}

void start(const VcBundle& vc, SolverSession& s) {
  for (const auto& [name, sort] : vc.variables) s.declare(name, sort);
  s.assert_persistent(vc.vc);
  s.assert_persistent(var(vc.entry_reach, Sort::Bool));
}

void finish(const VcBundle& vc, SolverSession& s, const SolverStats& before, CoverReport& r) {
  for (const auto& tc : r.test_cases) {
    for (const auto& l : tc.r_true()) r.reached.insert(l);
  }
  r.covered = collapse_labels(vc, r.reached);
  for (const auto& l : vc.original_labels) {
    if (!r.covered.count(l)) r.uncovered.insert(l);
  }
  const SolverStats& now = s.stats();
  r.stats.queries = now.queries - before.queries;
  r.stats.sat = now.sat - before.sat;
  r.stats.unsat = now.unsat - before.unsat;
  r.stats.timeouts = now.timeouts - before.timeouts;
  r.stats.time_ms = now.time_ms - before.time_ms;
  r.stats.model_checks = now.model_checks - before.model_checks;
  r.stats.model_check_failures = now.model_check_failures - before.model_check_failures;
}

std::string round_name(Algorithm a, std::size_t n) { return to_string(a) + "#" + std::to_string(n); }

}  // namespace

std::vector<std::string> extract_path(const VcBundle& vc, const Model& model) {
  Valuation val(model.begin(), model.end());
  std::vector<std::string> path{vc.entry};
  std::string cur = vc.entry;
  if (!model_bool(model, vc.block_var(cur))) {
    throw InternalError("model does not make the entry block terminate");
  }
  for (;;) {
    const auto& succs = vc.succs.at(cur);
    if (succs.empty()) return path;
    const std::string* best = nullptr;
    for (const auto& j : succs) {
      if (!model_bool(model, vc.block_var(j))) continue;
      if (!evaluate_bool(vc.edge_guard.at({cur, j}), val)) continue;
      if (!best || j < *best) best = &j;
    }
    if (!best) throw InternalError("no terminating successor of " + cur + " under the model");
    cur = *best;
    path.push_back(cur);
  }
}

TestCase decode_test_case(const VcBundle& vc, const Model& model, std::string source) {
  TestCase tc;
  for (const auto& i : vc.inputs) {
    auto it = model.find(i);
    if (it != model.end()) tc.inputs[i] = std::get<Int>(it->second);
  }
  for (const auto& o : vc.outputs) {
    auto it = model.find(o);
    if (it != model.end()) tc.outputs[o] = std::get<Int>(it->second);
  }
  for (const auto& b : vc.blocks) tc.r_valuation[b] = model_bool(model, vc.reach(b));
  tc.witness_path = extract_path(vc, model);
  tc.source = std::move(source);
  return tc;
}

std::set<std::string> collapse_labels(const VcBundle& vc, const std::set<std::string>& labels) {
  std::set<std::string> out;
  for (const auto& l : labels) {
    auto it = vc.origin.find(l);
    if (it == vc.origin.end()) continue;
    const Origin& o = it->second;
    if (o.proc == vc.proc && o.site == 0) out.insert(o.label);
  }
  return out;
}

void remove_double(const std::string& label, std::set<std::string>& uncovered,
                   const OriginMap& origin) {
  uncovered.erase(label);
  auto it = origin.find(label);
  if (it == origin.end()) return;
  for (auto u = uncovered.begin(); u != uncovered.end();) {
    auto o = origin.find(*u);
    if (o != origin.end() && o->second == it->second) {
      u = uncovered.erase(u);
    } else {
      ++u;
    }
  }
}

CoverReport path_cover(const VcBundle& vc, SolverSession& s) {
  CoverReport r;
  r.algorithm = Algorithm::Path;
  const SolverStats before = s.stats();
  start(vc, s);
  const auto wanted = wanted_vars(vc);
  for (;;) {
    CheckResult res = s.checksat({}, wanted);
    if (res.inconclusive()) {
      r.incomplete = true;
      break;
    }
    if (res.unsat()) break;
    TestCase tc = decode_test_case(vc, res.model, round_name(r.algorithm, r.test_cases.size() + 1));
    std::vector<ExprPtr> lits;
    for (const auto& b : vc.blocks) {
      ExprPtr rv = var(vc.reach(b), Sort::Bool);
      lits.push_back(tc.r_valuation.at(b) ? negate(rv) : rv);
    }
    r.test_cases.push_back(std::move(tc));
    s.assert_persistent(disj(std::move(lits)));
  }
  finish(vc, s, before, r);
  return r;
}

CoverReport stmt_cover(const VcBundle& vc, SolverSession& s) {
  CoverReport r;
  r.algorithm = Algorithm::Stmt;
  const SolverStats before = s.stats();
  start(vc, s);
  const auto wanted = wanted_vars(vc);
  std::set<std::string> uncovered(vc.blocks.begin(), vc.blocks.end());
  bool first = true;
  while (!uncovered.empty()) {
    std::vector<ExprPtr> assumptions;
    if (!first) {
      std::vector<ExprPtr> enabling;
      for (const auto& b : vc.blocks) {
        if (uncovered.count(b)) enabling.push_back(var(vc.reach(b), Sort::Bool));
      }
      assumptions.push_back(disj(std::move(enabling)));
    }
    first = false;
    CheckResult res = s.checksat(assumptions, wanted);
    if (res.inconclusive()) {
      r.incomplete = true;
      break;
    }
    if (res.unsat()) break;
    TestCase tc = decode_test_case(vc, res.model, round_name(r.algorithm, r.test_cases.size() + 1));
    for (const auto& l : tc.r_true()) remove_double(l, uncovered, vc.origin);
    r.test_cases.push_back(std::move(tc));
  }
  finish(vc, s, before, r);
  return r;
}

CoverReport fm_cover(const VcBundle& vc, SolverSession& s, bool reuse) {
  CoverReport r;
  r.algorithm = Algorithm::Fm;
  const SolverStats before = s.stats();
  start(vc, s);
  const auto wanted = wanted_vars(vc);
  std::set<std::string> seen;
  for (const auto& b : vc.blocks) {
    if (b == vc.exit) continue;  // reached by every model that reaches the entry
    if (reuse && seen.count(b)) continue;
    CheckResult res = s.checksat({var(vc.reach(b), Sort::Bool)}, wanted);
    if (res.inconclusive()) {
      r.incomplete = true;
      break;
    }
    if (res.unsat()) continue;
    TestCase tc = decode_test_case(vc, res.model, round_name(r.algorithm, r.test_cases.size() + 1));
    for (const auto& l : tc.r_true()) seen.insert(l);
    r.test_cases.push_back(std::move(tc));
  }
  finish(vc, s, before, r);
  return r;
}

CoverReport run_cover(Algorithm algo, const VcBundle& vc, const SolverOptions& options,
                      const CoverOptions& cover) {
  SolverSession s(logic_for(options, is_nonlinear(vc.vc)));
  switch (algo) {
    case Algorithm::Path: return path_cover(vc, s);
    case Algorithm::Stmt: return stmt_cover(vc, s);
    case Algorithm::Fm: return fm_cover(vc, s, cover.fm_reuse);
  }
  throw InternalError("unknown algorithm");
}

}  // namespace covgen
