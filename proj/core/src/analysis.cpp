#include "covgen/analysis.hpp"

#include <algorithm>
#include <set>

#include "covgen/error.hpp"
#include "covgen/exec.hpp"
#include "covgen/vcgen.hpp"

namespace covgen {

bool AnalysisConfig::operator==(const AnalysisConfig& o) const {
  return input == o.input && entry == o.entry && algorithm == o.algorithm && k == o.k &&
         max_inline_depth == o.max_inline_depth && summaries == o.summaries && cap == o.cap &&
         rounds == o.rounds && fm_reuse == o.fm_reuse && solver.command == o.solver.command &&
         solver.logic == o.solver.logic && solver.timeout_s == o.solver.timeout_s &&
         output == o.output && dump_passive == o.dump_passive && dump_vc == o.dump_vc;
}

bool AnalysisResult::all_replays_feasible() const {
  return std::all_of(replays.begin(), replays.end(),
                     [](const ReplayCheck& r) { return r.feasible(); });
}

int AnalysisResult::exit_code() const {
  if (cover.incomplete) return 3;
  if (!all_replays_feasible()) return 2;
  if (!cover.uncovered.empty()) return 1;
  return 0;
}

ReplayCheck check_replay(const Program& program, const Lowering& lowering, const VcBundle& vc,
                         const TestCase& tc, const SummaryTable* summaries) {
  ReplayCheck out;
  const State inputs = replay_inputs(tc.inputs);
  try {
    PathTrace t = replay_path(lowering.unwound.to_procedure(), inputs, tc.witness_path);
    out.unwound = t.feasible();
    if (!out.unwound) out.detail = "unwound graph blocked at " + t.blocked_label;
  } catch (const InputError& e) {
    out.detail = std::string("unwound graph: ") + e.what();
  }
  try {
    const auto steps = original_steps(tc.witness_path, vc.origin);
    CallResolver resolver;
    if (summaries) resolver = summary_resolver(*summaries);
    PathTrace t = replay_program(program, vc.proc, inputs, steps, summaries ? &resolver : nullptr);
    out.original = t.feasible();
    if (!out.original && out.detail.empty()) {
      out.detail = "original program blocked at " + t.blocked_proc + ":" + t.blocked_label;
    }
  } catch (const InputError& e) {
    if (out.detail.empty()) out.detail = std::string("original program: ") + e.what();
  }
  return out;
}

Lowering lower_for(const Program& program, const AnalysisConfig& config,
                   const SummaryTable* summaries) {
  UnwindConfig u;
  u.k = config.k;
  u.max_inline_depth = config.max_inline_depth;
  u.mode = config.summaries ? CallMode::UseSummaries : CallMode::InlineAll;
  return lower(program, config.entry, u, summaries);
}

namespace {

void run_once(const Program& program, const AnalysisConfig& config, AnalysisResult& r) {
  const SummaryTable* table = config.summaries ? &r.summaries : nullptr;
  r.lowering = lower_for(program, config, table);
  r.vc = build_reachability_vc(r.lowering.passive);
  CoverOptions co;
  co.fm_reuse = config.fm_reuse;
  r.cover = run_cover(config.algorithm, r.vc, config.solver, co);
  r.replays.clear();
  for (const auto& tc : r.cover.test_cases) {
    r.replays.push_back(check_replay(program, r.lowering, r.vc, tc, table));
  }
}

}  // namespace

AnalysisResult analyze_program(const Program& program, const AnalysisConfig& config) {
  if (!program.find(config.entry)) throw SemanticError("no procedure named " + config.entry);
  AnalysisResult r;
  if (!config.summaries) {
    run_once(program, config, r);
    return r;
  }

  UnwindConfig u;
  u.k = config.k;
  u.max_inline_depth = config.max_inline_depth;
  u.mode = CallMode::UseSummaries;
  r.summaries = build_summary_table(program, config.entry, config.algorithm, config.cap,
                                    config.solver, u);
  SolverStats spent;
  std::set<std::pair<std::string, std::string>> tried;  // (callee, constraints)
  for (unsigned round = 0;; ++round) {
    run_once(program, config, r);
    spent += r.cover.stats;
    if (round >= config.rounds || r.cover.incomplete || r.cover.uncovered.empty()) break;

    const Procedure* entry = program.find(config.entry);
    bool changed = false;
    for (const auto& b : entry->blocks) {
      if (!r.cover.uncovered.count(b.label)) continue;
      for (const auto& st : b.stmts) {
        const auto* c = std::get_if<Call>(&st);
        if (!c) continue;
        const Procedure* callee = program.find(c->callee);
        auto it = r.summaries.find(c->callee);
        if (!callee || it == r.summaries.end()) continue;
        auto constraints = literal_constraints(*c, *callee);
        if (constraints.empty()) continue;
        RefinementLog log;
        log.callee = c->callee;
        log.caller_block = b.label;
        std::string key;
        for (const auto& e : constraints) {
          log.constraints.push_back(to_source(e));
          key += log.constraints.back() + ";";
        }
        if (!tried.insert({c->callee, key}).second) continue;
        Summary refined = refine_summary(program, c->callee, constraints, config.algorithm,
                                         config.cap, config.solver, r.summaries, u);
        const std::size_t before = it->second.entries.size();
        merge_summary(it->second, refined);
        log.new_entries = it->second.entries.size() - before;
        changed = changed || log.new_entries > 0;
        r.refinements.push_back(std::move(log));
      }
    }
    if (!changed) break;
  }
  r.cover.stats = spent;
  return r;
}

}  // namespace covgen
