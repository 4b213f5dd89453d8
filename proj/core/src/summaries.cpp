#include "covgen/summaries.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "covgen/cover.hpp"
#include "covgen/error.hpp"
#include "covgen/exec.hpp"
#include "covgen/solver.hpp"
#include "covgen/vcgen.hpp"

namespace covgen {

ExprPtr summary_formula(const Summary& summary,
                        const std::function<ExprPtr(const std::string&)>& param_var,
                        const std::function<ExprPtr()>& result_var) {
  std::vector<ExprPtr> alts;
  for (const auto& e : summary.entries) {
    std::vector<ExprPtr> parts;
    for (const auto& p : summary.params) parts.push_back(equal(param_var(p), int_lit(e.pre.at(p))));
    if (summary.returns) {
      parts.push_back(equal(result_var(), int_lit(e.post.at(*summary.returns))));
    }
    alts.push_back(conj(std::move(parts)));
  }
  return disj(std::move(alts));
}

CallResolver summary_resolver(const SummaryTable& table) {
  return [&table](const std::string& callee,
                  const std::vector<Int>& args) -> std::optional<CallWitness> {
    auto it = table.find(callee);
    if (it == table.end()) return std::nullopt;
    const Summary& s = it->second;
    for (const auto& e : s.entries) {
      bool match = s.params.size() == args.size();
      for (std::size_t i = 0; match && i < args.size(); ++i) match = e.pre.at(s.params[i]) == args[i];
      if (match) return CallWitness{e.witness, e.witness_inputs};
    }
    return std::nullopt;
  };
}

namespace {

bool has_pre(const Summary& s, const SummaryEntry& e) {
  return std::any_of(s.entries.begin(), s.entries.end(),
                     [&](const SummaryEntry& x) { return x.pre == e.pre; });
}

}  // namespace

Summary build_summary(const Program& program, const std::string& proc, Algorithm algo,
                      std::size_t cap, const SolverOptions& solver, const SummaryTable& table,
                      const UnwindConfig& unwind, const std::vector<ExprPtr>& pre_constraints) {
  const Procedure* original = program.find(proc);
  if (!original) throw SemanticError("no procedure named " + proc);

  Program constrained = program;
  if (!pre_constraints.empty()) {
    for (auto& p : constrained.procedures) {
      if (p.name != proc) continue;
      auto& stmts = p.blocks.front().stmts;
      stmts.insert(stmts.begin(), Assume{conj(pre_constraints)});
    }
  }
  UnwindConfig u = unwind;
  u.mode = CallMode::UseSummaries;
  Lowering low = lower(constrained, proc, u, &table);
  VcBundle vc = build_reachability_vc(low.passive);
  CoverReport rep = run_cover(algo, vc, solver);

  Summary s;
  s.proc = proc;
  s.params = original->params;
  s.returns = original->returns;
  s.visible = original->params;
  if (original->returns) s.visible.push_back(*original->returns);
  s.max_entries = cap;

  const CallResolver resolver = summary_resolver(table);
  for (const auto& tc : rep.test_cases) {
    if (s.entries.size() >= cap) break;
    State inputs = replay_inputs(tc.inputs);
    SummaryEntry entry;
    for (const auto& p : s.params) {
      auto it = inputs.find(p);
      entry.pre[p] = it == inputs.end() ? Int(0) : it->second;
      inputs[p] = entry.pre[p];
    }
    if (has_pre(s, entry)) continue;
    entry.witness = original_steps(tc.witness_path, vc.origin);
    PathTrace trace = replay_program(program, proc, inputs, entry.witness, &resolver);
    if (!trace.feasible()) continue;
    bool consistent = true;
    for (const auto& v : s.visible) {
      auto fin = trace.final_state.find(v);
      Int value;
      if (fin != trace.final_state.end()) {
        value = fin->second;
      } else {
        auto in = inputs.find(v);
        value = in == inputs.end() ? Int(0) : in->second;
        inputs[v] = value;
      }
      entry.post[v] = value;
      auto last = low.passive.last_incarnation.find(v);
      if (last != low.passive.last_incarnation.end()) {
        auto out = tc.outputs.find(incarnation_name(v, last->second));
        if (out != tc.outputs.end() && out->second != value) consistent = false;
      }
    }
    if (!consistent) continue;
    entry.witness_inputs = std::move(inputs);
    s.entries.push_back(std::move(entry));
  }
  return s;
}

Summary refine_summary(const Program& program, const std::string& callee,
                       const std::vector<ExprPtr>& pre_constraints, Algorithm algo,
                       std::size_t cap, const SolverOptions& solver, const SummaryTable& table,
                       const UnwindConfig& unwind) {
  return build_summary(program, callee, algo, cap, solver, table, unwind, pre_constraints);
}

SummaryTable build_summary_table(const Program& program, const std::string& entry,
                                 Algorithm algo, std::size_t cap, const SolverOptions& solver,
                                 const UnwindConfig& unwind) {
  // Callees first: post-order over the call graph from the entry.
  std::vector<std::string> order;
  std::set<std::string> visited;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (!visited.insert(name).second) return;
    const Procedure* p = program.find(name);
    if (!p) throw SemanticError("unknown callee " + name);
    for (const auto& b : p->blocks) {
      for (const auto& st : b.stmts) {
        if (const auto* c = std::get_if<Call>(&st)) visit(c->callee);
      }
    }
    order.push_back(name);
  };
  visit(entry);

  SummaryTable table;
  for (const auto& name : order) {
    if (name == entry) continue;
    Summary s = build_summary(program, name, algo, cap, solver, table, unwind);
    table.emplace(name, std::move(s));
  }
  return table;
}

void merge_summary(Summary& base, const Summary& extra) {
  for (const auto& e : extra.entries) {
    if (!has_pre(base, e)) base.entries.push_back(e);
  }
}

std::vector<ExprPtr> literal_constraints(const Call& call, const Procedure& callee) {
  std::vector<ExprPtr> out;
  for (std::size_t i = 0; i < call.args.size() && i < callee.params.size(); ++i) {
    std::map<std::string, Sort> vars;
    collect_vars(call.args[i], vars);
    if (!vars.empty()) continue;
    Int value = std::get<Int>(evaluate(call.args[i], Valuation{}));
    out.push_back(equal(var(callee.params[i]), int_lit(value)));
  }
  return out;
}

}  // namespace covgen
