#include "covgen/transform.hpp"

#include <algorithm>
#include <cctype>

#include "covgen/error.hpp"
#include "covgen/summaries.hpp"

namespace covgen {

std::string incarnation_name(const std::string& base, unsigned index) {
  return base + "$" + std::to_string(index);
}

std::optional<std::pair<std::string, unsigned>> split_incarnation(const std::string& name) {
  auto pos = name.rfind('$');
  if (pos == std::string::npos || pos + 1 == name.size()) return std::nullopt;
  for (std::size_t i = pos + 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
  }
  return std::make_pair(name.substr(0, pos),
                        static_cast<unsigned>(std::stoul(name.substr(pos + 1))));
}

std::string inlined_var(const std::string& var, unsigned site) {
  return site == 0 ? var : var + "$i" + std::to_string(site);
}

std::optional<std::string> PassiveProcedure::edge_block(const std::string& from,
                                                        const std::string& to) const {
  for (const auto& [label, e] : edge_blocks) {
    if (e.from == from && e.to == to) return label;
  }
  return std::nullopt;
}

Cfg normalize_exit(Cfg cfg) {
  if (cfg.contains(kExitLabel)) return cfg;
  for (auto& b : cfg.blocks) {
    if (b.succs.empty()) b.succs.push_back(kExitLabel);
  }
  cfg.blocks.push_back(Block{kExitLabel, {}, {}});
  cfg.analyze();
  return cfg;
}

// ---------------------------------------------------------------------------
// Inlining

namespace {

Stmt rename_stmt(const Stmt& s, unsigned site) {
  auto rn = [site](const std::string& v) { return inlined_var(v, site); };
  if (const auto* a = std::get_if<Assign>(&s)) {
    return Assign{rn(a->target), rename_vars(a->rhs, rn)};
  }
  if (const auto* a = std::get_if<Assume>(&s)) {
    return Assume{rename_vars(a->cond, rn)};
  }
  const auto& c = std::get<Call>(s);
  Call out;
  if (c.target) out.target = rn(*c.target);
  out.callee = c.callee;
  for (const auto& e : c.args) out.args.push_back(rename_vars(e, rn));
  return out;
}

std::string inlined_label(const std::string& label, unsigned site) {
  return label + "$i" + std::to_string(site);
}

}  // namespace

std::vector<Stmt> substitute_call(const Call& call, const Summary& summary, unsigned site) {
  const std::string suffix = "$s" + std::to_string(site);
  std::vector<Stmt> out;
  for (std::size_t i = 0; i < summary.params.size() && i < call.args.size(); ++i) {
    out.push_back(Assume{equal(var(summary.params[i] + suffix), call.args[i])});
  }
  ExprPtr sum = summary_formula(
      summary, [&](const std::string& p) { return var(p + suffix); },
      [&] { return var(*summary.returns + suffix); });
  out.push_back(Assume{sum});
  if (call.target && summary.returns) {
    out.push_back(Assign{*call.target, var(*summary.returns + suffix)});
  }
  return out;
}

Cfg inline_calls(const Program& program, const std::string& entry_name,
                 const UnwindConfig& config, const SummaryTable* summaries) {
  const Procedure* entry = program.find(entry_name);
  if (!entry) throw SemanticError("no procedure named " + entry_name);

  Cfg cfg;
  cfg.proc = entry->name;
  cfg.params = entry->params;
  cfg.returns = entry->returns;
  cfg.blocks = entry->blocks;
  std::vector<std::vector<std::string>> chains(cfg.blocks.size(),
                                               std::vector<std::string>{entry->name});
  for (const auto& b : entry->blocks) cfg.origin[b.label] = Origin{entry->name, b.label};

  unsigned site_counter = 0;
  for (std::size_t bi = 0; bi < cfg.blocks.size(); ++bi) {
    for (std::size_t si = 0; si < cfg.blocks[bi].stmts.size(); ++si) {
      const auto* call_ptr = std::get_if<Call>(&cfg.blocks[bi].stmts[si]);
      if (!call_ptr) continue;
      const Call call = *call_ptr;
      const Procedure* callee = program.find(call.callee);
      if (!callee) throw SemanticError("unknown callee " + call.callee);
      auto& stmts = cfg.blocks[bi].stmts;

      if (config.mode == CallMode::UseSummaries) {
        const unsigned site = ++site_counter;
        std::vector<Stmt> repl;
        auto it = summaries ? summaries->find(call.callee) : SummaryTable::const_iterator{};
        if (summaries && it != summaries->end()) {
          repl = substitute_call(call, it->second, site);
        } else {
          repl.push_back(Assume{bool_lit(false)});
        }
        stmts.erase(stmts.begin() + static_cast<std::ptrdiff_t>(si));
        stmts.insert(stmts.begin() + static_cast<std::ptrdiff_t>(si), repl.begin(), repl.end());
        si += repl.size() - 1;
        continue;
      }

      const auto& chain = chains[bi];
      if (static_cast<unsigned>(std::count(chain.begin(), chain.end(), callee->name)) >=
          config.max_inline_depth) {
        stmts[si] = Assume{bool_lit(false)};
        continue;
      }

      const unsigned site = ++site_counter;
      Block& caller = cfg.blocks[bi];
      const Origin caller_origin = cfg.origin.at(caller.label);
      Block cont;
      cont.label = caller.label + "$r" + std::to_string(site);
      cont.succs = caller.succs;
      if (call.target) {
        cont.stmts.push_back(
            Assign{*call.target, var(inlined_var(*callee->returns, site))});
      }
      cont.stmts.insert(cont.stmts.end(), caller.stmts.begin() + static_cast<std::ptrdiff_t>(si) + 1,
                        caller.stmts.end());
      caller.stmts.resize(si);
      for (std::size_t a = 0; a < callee->params.size(); ++a) {
        caller.stmts.push_back(Assign{inlined_var(callee->params[a], site), call.args[a]});
      }
      caller.succs = {inlined_label(callee->blocks.front().label, site)};

      std::vector<std::string> callee_chain = chains[bi];
      callee_chain.push_back(callee->name);
      std::vector<Block> fresh;
      for (const auto& cb : callee->blocks) {
        Block nb;
        nb.label = inlined_label(cb.label, site);
        for (const auto& s : cb.stmts) nb.stmts.push_back(rename_stmt(s, site));
        for (const auto& s : cb.succs) nb.succs.push_back(inlined_label(s, site));
        if (nb.succs.empty()) nb.succs.push_back(cont.label);
        cfg.origin[nb.label] = Origin{callee->name, cb.label, site, false};
        fresh.push_back(std::move(nb));
      }
      Origin cont_origin = caller_origin;
      cont_origin.resume = true;
      cfg.origin[cont.label] = cont_origin;
      const auto cont_chain = chains[bi];

      for (auto& nb : fresh) {
        cfg.blocks.push_back(std::move(nb));
        chains.push_back(callee_chain);
      }
      cfg.blocks.push_back(std::move(cont));
      chains.push_back(cont_chain);
      break;  // the rest of this block now lives in the continuation
    }
  }
  cfg.analyze();
  return cfg;
}

// ---------------------------------------------------------------------------
// Loop unwinding

namespace {

const Loop* innermost_loop(const Cfg& cfg) {
  const Loop* best = nullptr;
  std::size_t best_index = 0;
  for (const auto& loop : cfg.loops) {
    bool nested = false;
    for (const auto& other : cfg.loops) {
      if (other.header != loop.header && loop.body.count(other.header)) {
        nested = true;
        break;
      }
    }
    if (nested) continue;
    std::size_t idx = cfg.index.at(loop.header);
    if (!best || idx < best_index) {
      best = &loop;
      best_index = idx;
    }
  }
  return best;
}

}  // namespace

Cfg unwind_loops(Cfg cfg, unsigned k) {
  cfg.analyze();
  unsigned counter = 0;
  auto fresh_suffix = [&](const std::string& tag, const std::vector<std::string>& bases) {
    for (;;) {
      std::string s = tag + std::to_string(++counter);
      bool clash = false;
      for (const auto& b : bases) {
        if (cfg.contains(b + s)) {
          clash = true;
          break;
        }
      }
      if (!clash) return s;
    }
  };

  while (!cfg.loops.empty()) {
    const Loop loop = *innermost_loop(cfg);
    std::vector<std::string> members;  // block order
    for (const auto& b : cfg.blocks) {
      if (loop.body.count(b.label)) members.push_back(b.label);
    }
    std::string exit_target;
    for (const auto& m : members) {
      for (const auto& s : cfg.block(m).succs) {
        if (!loop.body.count(s)) {
          exit_target = s;
          break;
        }
      }
      if (!exit_target.empty()) break;
    }
    if (exit_target.empty()) {
      if (!cfg.contains(kExitLabel)) {
        throw InternalError("unwinding a loop without exit before exit normalisation");
      }
      exit_target = kExitLabel;
    }

    std::vector<std::string> suffixes;  // suffixes[i] names copy i+1
    for (unsigned i = 0; i < k; ++i) suffixes.push_back(fresh_suffix("$u", members));
    const std::string cut = loop.header + fresh_suffix("$cut", {loop.header});

    auto name_in = [&](const std::string& n, unsigned copy) {
      return copy == 0 ? n : n + suffixes[copy - 1];
    };
    auto header_after = [&](unsigned copy) {
      return copy < k ? name_in(loop.header, copy + 1) : cut;
    };

    std::map<std::string, Block> body;  // untouched originals
    for (const auto& m : members) body.emplace(m, cfg.block(m));
    std::vector<Block> added;
    for (unsigned copy = 0; copy <= k; ++copy) {
      for (const auto& m : members) {
        Block nb = body.at(m);
        nb.label = name_in(m, copy);
        for (auto& s : nb.succs) {
          if (s == loop.header && loop.latches.count(m)) {
            s = header_after(copy);
          } else if (loop.body.count(s)) {
            s = name_in(s, copy);
          }
        }
        if (copy == 0) {
          cfg.block(m).succs = nb.succs;
        } else {
          auto it = cfg.origin.find(m);
          if (it != cfg.origin.end()) cfg.origin[nb.label] = it->second;
          added.push_back(std::move(nb));
        }
      }
    }
    added.push_back(Block{cut, {Assume{bool_lit(false)}}, {exit_target}});
    for (auto& b : added) cfg.blocks.push_back(std::move(b));
    cfg.analyze();
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Passification

PassiveProcedure passify(const Cfg& input) {
  Cfg cfg = input;
  cfg.analyze();
  if (!cfg.loops.empty()) throw InternalError("passify requires an acyclic graph");
  if (cfg.exit.empty()) throw InternalError("passify requires a unique exit block");
  const auto order = cfg.topological_order();

  PassiveProcedure out;
  std::map<std::string, unsigned> last_index;
  auto& entry_inc = out.entry_incarnation;
  auto& exit_inc = out.exit_incarnation;
  auto inc = [](const std::map<std::string, unsigned>& m, const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? 0u : it->second;
  };
  auto current_var = [&](const std::map<std::string, unsigned>& m) {
    return [&m, &inc](const std::string& v) { return incarnation_name(v, inc(m, v)); };
  };

  std::vector<Block> edge_blocks;
  std::map<std::string, std::map<std::string, std::string>> redirect;  // pred -> (succ -> edge)

  for (const auto& label : order) {
    const auto& preds = cfg.preds.at(label);
    std::map<std::string, unsigned> entry;
    if (preds.size() == 1) {
      entry = exit_inc.at(*preds.begin());
    } else if (preds.size() > 1) {
      std::vector<std::string> ordered_preds;
      for (const auto& b : cfg.blocks) {
        if (preds.count(b.label)) ordered_preds.push_back(b.label);
      }
      std::set<std::string> vars;
      for (const auto& p : ordered_preds) {
        for (const auto& [v, i] : exit_inc.at(p)) vars.insert(v);
      }
      std::map<std::string, unsigned> unified;
      for (const auto& v : vars) {
        const unsigned first = inc(exit_inc.at(ordered_preds.front()), v);
        bool agree = true;
        for (const auto& p : ordered_preds) agree = agree && inc(exit_inc.at(p), v) == first;
        if (agree) {
          if (first) entry[v] = first;
        } else {
          unified[v] = entry[v] = ++last_index[v];
        }
      }
      if (!unified.empty()) {
        for (const auto& p : ordered_preds) {
          Block eb;
          eb.label = "$e" + p + "_" + label;
          for (const auto& [v, i] : unified) {
            eb.stmts.push_back(Assume{equal(var(incarnation_name(v, i)),
                                            var(incarnation_name(v, inc(exit_inc.at(p), v))))});
          }
          eb.succs = {label};
          redirect[p][label] = eb.label;
          out.edge_blocks[eb.label] = EdgeBlock{p, label};
          edge_blocks.push_back(std::move(eb));
        }
      }
    }
    entry_inc[label] = entry;
    auto current = entry;
    Block& b = cfg.block(label);
    std::vector<Stmt> stmts;
    for (const auto& s : b.stmts) {
      if (const auto* a = std::get_if<Assume>(&s)) {
        stmts.push_back(Assume{rename_vars(a->cond, current_var(current))});
      } else if (const auto* a = std::get_if<Assign>(&s)) {
        ExprPtr rhs = rename_vars(a->rhs, current_var(current));
        const unsigned fresh = ++last_index[a->target];
        current[a->target] = fresh;
        stmts.push_back(Assume{equal(var(incarnation_name(a->target, fresh)), rhs)});
      } else {
        throw InternalError("call statement in block " + label + " reached passification");
      }
    }
    b.stmts = std::move(stmts);
    exit_inc[label] = std::move(current);
  }

  for (auto& [pred, targets] : redirect) {
    for (auto& s : cfg.block(pred).succs) {
      auto it = targets.find(s);
      if (it != targets.end()) s = it->second;
    }
  }
  for (auto& eb : edge_blocks) cfg.blocks.push_back(std::move(eb));
  cfg.analyze();

  std::map<std::string, Sort> vars;
  for (const auto& b : cfg.blocks) {
    for (const auto& s : b.stmts) collect_vars(std::get<Assume>(s).cond, vars);
  }
  std::set<std::string> bases;
  for (const auto& [name, sort] : vars) {
    auto split = split_incarnation(name);
    if (!split) continue;
    bases.insert(split->first);
    if (split->second == 0) out.inputs.push_back(name);
  }
  for (const auto& p : cfg.params) bases.insert(p);
  if (cfg.returns) bases.insert(*cfg.returns);
  const auto& final_map = exit_inc.at(cfg.exit);
  for (const auto& v : bases) out.last_incarnation[v] = inc(final_map, v);
  if (cfg.returns) {
    out.result_var = incarnation_name(*cfg.returns, out.last_incarnation[*cfg.returns]);
  }
  for (const auto& [label, o] : cfg.origin) {
    if (o.proc == cfg.proc && o.site == 0) out.original_labels.insert(o.label);
  }
  out.cfg = std::move(cfg);
  return out;
}

Lowering lower(const Program& program, const std::string& entry, const UnwindConfig& config,
               const SummaryTable* summaries) {
  Lowering out;
  Cfg cfg = inline_calls(program, entry, config, summaries);
  cfg = normalize_exit(std::move(cfg));
  out.unwound = unwind_loops(std::move(cfg), config.k);
  out.passive = passify(out.unwound);
  return out;
}

std::vector<Step> original_steps(const std::vector<std::string>& path, const OriginMap& origin) {
  std::vector<Step> out;
  for (const auto& label : path) {
    auto it = origin.find(label);
    if (it == origin.end() || it->second.resume) continue;
    out.push_back(Step{it->second.proc, it->second.label, it->second.site});
  }
  return out;
}

}  // namespace covgen
