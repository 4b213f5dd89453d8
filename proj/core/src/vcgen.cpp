#include "covgen/vcgen.hpp"

#include <algorithm>
#include <sstream>

#include "covgen/error.hpp"

namespace covgen {

ExprPtr wlp_stmts(std::span<const Stmt> stmts, ExprPtr post) {
  ExprPtr q = std::move(post);
  for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) {
    if (const auto* a = std::get_if<Assume>(&*it)) {
      q = implies(a->cond, q);
    } else if (const auto* a = std::get_if<Assign>(&*it)) {
      q = substitute(q, {{a->target, a->rhs}});
    } else {
      throw InternalError("wlp of a call statement; calls must be eliminated first");
    }
  }
  return q;
}

namespace {

ExprPtr assumptions_of(const Block& b) {
  std::vector<ExprPtr> parts;
  for (const auto& s : b.stmts) {
    const auto* a = std::get_if<Assume>(&s);
    if (!a) throw InternalError("non-assume statement in passive block " + b.label);
    parts.push_back(a->cond);
  }
  return conj(std::move(parts));
}

struct Skeleton {
  std::vector<std::string> blocks;
  std::map<std::string, std::vector<std::string>> succs, preds;
  std::map<std::pair<std::string, std::string>, ExprPtr> guard;
};

// Ordinary blocks with edge blocks collapsed into guarded edges.
Skeleton skeleton(const PassiveProcedure& p) {
  Skeleton sk;
  for (const auto& label : p.cfg.topological_order()) {
    if (p.edge_blocks.count(label)) continue;
    sk.blocks.push_back(label);
    sk.succs[label];
    sk.preds[label];
  }
  for (const auto& label : sk.blocks) {
    for (const auto& s : p.cfg.block(label).succs) {
      auto eb = p.edge_blocks.find(s);
      std::string target = eb == p.edge_blocks.end() ? s : eb->second.to;
      ExprPtr g = eb == p.edge_blocks.end() ? bool_lit(true) : assumptions_of(p.cfg.block(s));
      auto& out = sk.succs[label];
      if (std::find(out.begin(), out.end(), target) != out.end()) continue;
      out.push_back(target);
      sk.preds[target].push_back(label);
      sk.guard[{label, target}] = g;
    }
  }
  return sk;
}

std::string bvar(const std::string& label) { return "B_" + label; }
std::string rvar(const std::string& label) { return "R_" + label; }

}  // namespace

std::vector<std::string> VcBundle::reach_list() const {
  std::vector<std::string> out;
  for (const auto& b : blocks) out.push_back(reach_vars.at(b));
  return out;
}

WlpConjunction build_wlp_conjunction(const PassiveProcedure& p) {
  const Skeleton sk = skeleton(p);
  WlpConjunction out;
  std::vector<ExprPtr> defs;
  for (const auto& label : sk.blocks) {
    out.block_vars[label] = bvar(label);
    ExprPtr body = assumptions_of(p.cfg.block(label));
    const auto& succs = sk.succs.at(label);
    if (!succs.empty()) {
      std::vector<ExprPtr> alts;
      for (const auto& j : succs) {
        alts.push_back(conj({sk.guard.at({label, j}), var(bvar(j), Sort::Bool)}));
      }
      body = conj({body, disj(std::move(alts))});
    }
    defs.push_back(iff(var(bvar(label), Sort::Bool), body));
  }
  out.formula = conj(std::move(defs));
  return out;
}

VcBundle build_reachability_vc(const PassiveProcedure& p) {
  const Skeleton sk = skeleton(p);
  WlpConjunction w = build_wlp_conjunction(p);
  VcBundle vc;
  vc.wlp = w.formula;
  vc.block_vars = std::move(w.block_vars);
  vc.entry = p.cfg.entry;
  vc.exit = p.cfg.exit;
  vc.blocks = sk.blocks;
  vc.succs = sk.succs;
  vc.preds = sk.preds;
  vc.edge_guard = sk.guard;

  std::vector<ExprPtr> defs{vc.wlp};
  for (const auto& label : sk.blocks) {
    vc.reach_vars[label] = rvar(label);
    ExprPtr r = var(rvar(label), Sort::Bool);
    ExprPtr b = var(bvar(label), Sort::Bool);
    if (label == vc.entry) {
      defs.push_back(iff(r, b));
      continue;
    }
    std::vector<ExprPtr> from;
    for (const auto& i : sk.preds.at(label)) {
      from.push_back(conj({var(rvar(i), Sort::Bool), sk.guard.at({i, label})}));
    }
    defs.push_back(iff(r, conj({b, disj(std::move(from))})));
  }
  vc.vc = conj(std::move(defs));
  vc.entry_reach = rvar(vc.entry);
  vc.inputs = p.inputs;
  std::vector<std::string> visible = p.cfg.params;
  if (p.cfg.returns) visible.push_back(*p.cfg.returns);
  for (const auto& v : visible) {
    auto it = p.last_incarnation.find(v);
    if (it != p.last_incarnation.end()) vc.outputs.push_back(incarnation_name(v, it->second));
  }
  collect_vars(vc.vc, vc.variables);
  for (const auto& i : vc.inputs) vc.variables.emplace(i, Sort::Int);
  for (const auto& o : vc.outputs) vc.variables.emplace(o, Sort::Int);
  vc.origin = p.cfg.origin;
  vc.proc = p.cfg.proc;
  vc.original_labels = p.original_labels;
  return vc;
}

std::string vc_to_smtlib(const VcBundle& vc, const std::string& logic) {
  std::ostringstream os;
  os << "(set-logic " << logic << ")\n";
  for (const auto& [name, sort] : vc.variables) {
    os << "(declare-fun " << name << " () " << (sort == Sort::Int ? "Int" : "Bool") << ")\n";
  }
  os << "(assert " << to_smtlib(vc.vc) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace covgen
