#include "covgen/exec.hpp"

#include <algorithm>
#include <limits>

#include "covgen/error.hpp"
#include "covgen/vcgen.hpp"

namespace covgen {

namespace {

struct Blocked {};

struct Frame {
  const Procedure* proc;
  unsigned site;
  State env;
  const State* inputs;
};

class Engine {
 public:
  Engine(const Program* program, const CallResolver* resolver)
      : program_(program), resolver_(resolver) {}

  PathTrace run_top(const Procedure& proc, const State& inputs, const std::vector<Step>& steps) {
    Frame top{&proc, 0, {}, &inputs};
    std::size_t pos = 0;
    try {
      run(top, steps, pos);
      if (pos != steps.size()) {
        throw InputError("path continues after the final block: " + steps[pos].label);
      }
    } catch (const Blocked&) {
      trace_.verdict = Verdict::Blocked;
    }
    trace_.final_state = top.env;
    // unread entry-frame inputs keep their initial values
    for (const auto& [name, v] : inputs) {
      if (name.find('$') == std::string::npos) trace_.final_state.emplace(name, v);
    }
    return std::move(trace_);
  }

 private:
  Int read(Frame& f, const std::string& name) {
    auto it = f.env.find(name);
    if (it != f.env.end()) return it->second;
    const std::string key = inlined_var(name, f.site);
    auto in = f.inputs->find(key);
    if (in == f.inputs->end()) {
      throw InputError("unbound variable " + name + " in " + f.proc->name + " (no input " + key + ")");
    }
    f.env[name] = in->second;
    return in->second;
  }

  Value eval(Frame& f, const ExprPtr& e) {
    std::map<std::string, Sort> vars;
    collect_vars(e, vars);
    Valuation val;
    for (const auto& [name, sort] : vars) val[name] = read(f, name);
    return evaluate(e, val);
  }

  void blocked(const Frame& f, const std::string& label, std::size_t idx) {
    trace_.blocked_proc = f.proc->name;
    trace_.blocked_label = label;
    trace_.blocked_stmt = idx;
    throw Blocked{};
  }

  void call(Frame& f, const Call& c, const std::string& label, std::size_t idx,
            const std::vector<Step>& steps, std::size_t& pos) {
    if (!program_) throw InputError("call to " + c.callee + " needs the whole program");
    const Procedure* callee = program_->find(c.callee);
    if (!callee) throw InputError("unknown callee " + c.callee);
    std::vector<Int> args;
    for (const auto& a : c.args) args.push_back(std::get<Int>(eval(f, a)));

    Frame nf{callee, 0, {}, f.inputs};
    std::optional<CallWitness> witness;
    if (resolver_) {
      witness = (*resolver_)(c.callee, args);
      if (!witness) blocked(f, label, idx);
      nf.inputs = &witness->inputs;
    } else {
      if (pos >= steps.size() || steps[pos].proc != callee->name) {
        throw InputError("path lacks the blocks of the call to " + c.callee + " in " + label);
      }
      nf.site = steps[pos].site;
    }
    for (std::size_t i = 0; i < callee->params.size(); ++i) nf.env[callee->params[i]] = args[i];
    if (witness) {
      std::size_t wpos = 0;
      run(nf, witness->steps, wpos);
      if (wpos != witness->steps.size()) throw InputError("call witness for " + c.callee + " is too long");
    } else {
      run(nf, steps, pos);
    }
    if (c.target) {
      if (!callee->returns) throw InputError(c.callee + " does not return a value");
      f.env[*c.target] = read(nf, *callee->returns);
    }
  }

  void run(Frame& f, const std::vector<Step>& steps, std::size_t& pos) {
    if (pos >= steps.size()) throw InputError("empty path for " + f.proc->name);
    if (steps[pos].label != f.proc->blocks.front().label || steps[pos].proc != f.proc->name) {
      throw InputError("path does not start at the entry block of " + f.proc->name);
    }
    for (;;) {
      const Step& step = steps[pos];
      const Block* b = f.proc->find_block(step.label);
      if (!b) throw InputError("no block " + step.label + " in " + f.proc->name);
      trace_.path.push_back(b->label);
      trace_.states.push_back(f.env);
      ++pos;
      for (std::size_t i = 0; i < b->stmts.size(); ++i) {
        const Stmt& s = b->stmts[i];
        if (const auto* a = std::get_if<Assign>(&s)) {
          f.env[a->target] = std::get<Int>(eval(f, a->rhs));
        } else if (const auto* a = std::get_if<Assume>(&s)) {
          if (!std::get<bool>(eval(f, a->cond))) blocked(f, b->label, i);
        } else {
          call(f, std::get<Call>(s), b->label, i, steps, pos);
        }
      }
      if (b->succs.empty()) return;
      if (pos >= steps.size()) throw InputError("path ends at non-final block " + b->label);
      const Step& next = steps[pos];
      if (next.proc != f.proc->name || next.site != f.site ||
          std::find(b->succs.begin(), b->succs.end(), next.label) == b->succs.end()) {
        throw InputError("path is not CFG-adjacent: " + b->label + " -> " + next.label);
      }
    }
  }

  const Program* program_;
  const CallResolver* resolver_;
  PathTrace trace_;
};

}  // namespace

PathTrace replay_path(const Procedure& proc, const State& inputs,
                      const std::vector<std::string>& path) {
  std::vector<Step> steps;
  for (const auto& l : path) steps.push_back(Step{proc.name, l, 0});
  return Engine(nullptr, nullptr).run_top(proc, inputs, steps);
}

PathTrace replay_program(const Program& program, const std::string& entry, const State& inputs,
                         const std::vector<Step>& steps, const CallResolver* resolver) {
  const Procedure* proc = program.find(entry);
  if (!proc) throw InputError("no procedure named " + entry);
  return Engine(&program, resolver).run_top(*proc, inputs, steps);
}

State replay_inputs(const std::map<std::string, Int>& incarnations) {
  State out;
  for (const auto& [name, value] : incarnations) {
    auto split = split_incarnation(name);
    if (split && split->second == 0) out[split->first] = value;
  }
  return out;
}

std::size_t count_paths(const Cfg& cfg, std::size_t cap) {
  std::map<std::string, std::size_t> n;
  auto order = cfg.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& succs = cfg.succs.at(*it);
    std::size_t c = 0;
    if (succs.empty()) {
      c = (cfg.exit.empty() || *it == cfg.exit) ? 1 : 0;
    }
    for (const auto& s : succs) c = n[s] > cap - c ? cap : c + n[s];
    n[*it] = c;
  }
  return n[cfg.entry];
}

bool is_nonlinear(const Cfg& cfg) {
  for (const auto& l : cfg.labels()) {
    for (const auto& st : cfg.block(l).stmts) {
      if (const auto* a = std::get_if<Assign>(&st); a && is_nonlinear(a->rhs)) return true;
      if (const auto* a = std::get_if<Assume>(&st); a && is_nonlinear(a->cond)) return true;
      if (const auto* c = std::get_if<Call>(&st)) {
        for (const auto& e : c->args) {
          if (is_nonlinear(e)) return true;
        }
      }
    }
  }
  return false;
}

OracleResult enumerate_paths_oracle(const Cfg& cfg, SolverSession& s, std::size_t max_paths) {
  if (!cfg.is_acyclic()) throw InputError("oracle needs an acyclic graph");
  const std::size_t total = count_paths(cfg, std::numeric_limits<std::size_t>::max());
  if (total > max_paths) {
    throw InputError("too many complete paths for the oracle: " + std::to_string(total) +
                     " (limit " + std::to_string(max_paths) + ")");
  }
  OracleResult out;
  out.path_count = total;

  std::vector<std::string> path{cfg.entry};
  std::vector<std::size_t> next{0};
  auto finish_path = [&] {
    std::vector<Stmt> stmts;
    for (const auto& l : path) {
      const auto& b = cfg.block(l);
      stmts.insert(stmts.end(), b.stmts.begin(), b.stmts.end());
    }
    ExprPtr feasible = negate(wlp_stmts(stmts, bool_lit(false)));
    // variables the wlp drops still need replay values
    std::map<std::string, Sort> vars;
    collect_vars(feasible, vars);
    for (const auto& st : stmts) {
      if (const auto* a = std::get_if<Assign>(&st)) {
        collect_vars(a->rhs, vars);
      } else if (const auto* a = std::get_if<Assume>(&st)) {
        collect_vars(a->cond, vars);
      }
    }
    std::vector<std::string> wanted;
    for (const auto& [name, sort] : vars) {
      s.declare(name, sort);
      wanted.push_back(name);
    }
    OraclePath op;
    op.path = path;
    CheckResult r = s.checksat({feasible}, wanted);
    if (r.inconclusive()) {
      out.incomplete = true;
    } else if (r.sat()) {
      op.feasible = true;
      for (const auto& [name, v] : r.model) {
        if (const Int* i = std::get_if<Int>(&v)) op.inputs[name] = *i;
      }
      out.feasible_block_union.insert(path.begin(), path.end());
    }
    out.paths.push_back(std::move(op));
  };

  while (!path.empty()) {
    const auto& succs = cfg.block(path.back()).succs;
    if (succs.empty()) {
      if (cfg.exit.empty() || path.back() == cfg.exit) finish_path();
      if (out.incomplete) break;
      path.pop_back();
      next.pop_back();
      continue;
    }
    if (next.back() >= succs.size()) {
      path.pop_back();
      next.pop_back();
      continue;
    }
    path.push_back(succs[next.back()++]);
    next.push_back(0);
  }
  return out;
}

}  // namespace covgen
