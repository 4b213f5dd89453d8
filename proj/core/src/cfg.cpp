#include "covgen/cfg.hpp"

#include <algorithm>
#include <deque>

#include "covgen/error.hpp"

namespace covgen {
namespace {

constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

// Dominator tree over block indices with a virtual root whose children are
// the entry and every block the entry cannot reach (first-come roots).
struct DomTree {
  std::vector<std::size_t> idom;  // kRoot for root children
  std::vector<std::vector<std::size_t>> roots_children;
  std::vector<std::size_t> roots;

  bool dominates(std::size_t a, std::size_t b) const {
    for (std::size_t n = b; n != kRoot; n = idom[n]) {
      if (n == a) return true;
    }
    return false;
  }
};

std::vector<std::vector<std::size_t>> succ_lists(const Cfg& cfg) {
  std::vector<std::vector<std::size_t>> out(cfg.blocks.size());
  for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
    for (const auto& s : cfg.blocks[i].succs) {
      std::size_t j = cfg.index.at(s);
      if (std::find(out[i].begin(), out[i].end(), j) == out[i].end()) {
        out[i].push_back(j);
      }
    }
  }
  return out;
}

// Roots: entry first, then each block not reached so far, in block order.
std::vector<std::size_t> compute_roots(const std::vector<std::vector<std::size_t>>& succ) {
  const std::size_t n = succ.size();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> roots;
  for (std::size_t r = 0; r < n; ++r) {
    if (seen[r]) continue;
    roots.push_back(r);
    std::vector<std::size_t> stack{r};
    seen[r] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : succ[u]) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
  }
  return roots;
}

// Depth-first walk from the virtual root. Produces reverse postorder and the
// list of retreating edges (edges to a node currently on the DFS stack).
void dfs(const std::vector<std::vector<std::size_t>>& succ,
         const std::vector<std::size_t>& roots, std::vector<std::size_t>& rpo,
         std::vector<std::pair<std::size_t, std::size_t>>& retreating) {
  const std::size_t n = succ.size();
  enum : char { White, Grey, Black };
  std::vector<char> color(n, White);
  std::vector<std::size_t> post;
  for (std::size_t r : roots) {
    if (color[r] != White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{r, 0}};
    color[r] = Grey;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < succ[u].size()) {
        std::size_t v = succ[u][next++];
        if (color[v] == White) {
          color[v] = Grey;
          stack.push_back({v, 0});
        } else if (color[v] == Grey) {
          retreating.push_back({u, v});
        }
      } else {
        color[u] = Black;
        post.push_back(u);
        stack.pop_back();
      }
    }
  }
  rpo.assign(post.rbegin(), post.rend());
}

DomTree dominators(const std::vector<std::vector<std::size_t>>& succ,
                   const std::vector<std::size_t>& roots,
                   const std::vector<std::size_t>& rpo) {
  const std::size_t n = succ.size();
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v : succ[u]) pred[v].push_back(u);
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < rpo.size(); ++i) order[rpo[i]] = i;
  std::vector<bool> is_root(n, false);
  for (std::size_t r : roots) is_root[r] = true;

  // Cooper/Harvey/Kennedy iteration; kRoot is the virtual root.
  constexpr std::size_t kUndef = static_cast<std::size_t>(-2);
  std::vector<std::size_t> idom(n, kUndef);
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      if (a == kRoot || b == kRoot) return kRoot;
      while (a != kRoot && b != kRoot && order[a] > order[b]) a = idom[a];
      while (a != kRoot && b != kRoot && order[b] > order[a]) b = idom[b];
      if (a == kRoot || b == kRoot) return kRoot;
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t u : rpo) {
      std::size_t best = is_root[u] ? kRoot : kUndef;
      for (std::size_t p : pred[u]) {
        if (idom[p] == kUndef && !is_root[p]) continue;
        best = best == kUndef ? p : intersect(best, p);
      }
      if (best != kUndef && best != idom[u]) {
        idom[u] = best;
        changed = true;
      }
    }
  }
  DomTree t;
  t.idom = std::move(idom);
  t.roots = roots;
  return t;
}

}  // namespace

const Block& Cfg::block(const std::string& label) const {
  auto it = index.find(label);
  if (it == index.end()) throw InternalError("no block " + label);
  return blocks[it->second];
}

Block& Cfg::block(const std::string& label) {
  auto it = index.find(label);
  if (it == index.end()) throw InternalError("no block " + label);
  return blocks[it->second];
}

std::vector<std::string> Cfg::sinks() const {
  std::vector<std::string> out;
  for (const auto& b : blocks) {
    if (b.succs.empty()) out.push_back(b.label);
  }
  return out;
}

std::vector<std::string> Cfg::labels() const {
  std::vector<std::string> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(b.label);
  return out;
}

std::size_t Cfg::edge_count() const {
  std::size_t n = 0;
  for (const auto& [label, s] : succs) n += s.size();
  return n;
}

void Cfg::analyze() {
  if (blocks.empty()) throw CfgError("procedure " + proc + " has no blocks");
  index.clear();
  preds.clear();
  succs.clear();
  back_edges.clear();
  loops.clear();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!index.emplace(blocks[i].label, i).second) {
      throw CfgError("duplicate label " + blocks[i].label);
    }
  }
  for (const auto& b : blocks) {
    preds[b.label];
    auto& out = succs[b.label];
    for (const auto& s : b.succs) {
      if (!index.count(s)) throw CfgError("unresolved goto target " + s);
      out.insert(s);
      preds[s].insert(b.label);
    }
  }
  entry = blocks.front().label;
  auto sk = sinks();
  exit = sk.size() == 1 ? sk.front() : std::string();

  auto succ = succ_lists(*this);
  auto roots = compute_roots(succ);
  std::vector<std::size_t> rpo;
  std::vector<std::pair<std::size_t, std::size_t>> retreating;
  dfs(succ, roots, rpo, retreating);
  DomTree dom = dominators(succ, roots, rpo);

  std::map<std::size_t, Loop> by_header;
  for (auto [u, v] : retreating) {
    if (!dom.dominates(v, u)) {
      throw CfgError("irreducible control flow in procedure " + proc +
                     ": retreating edge " + blocks[u].label + " -> " +
                     blocks[v].label + " enters a cycle whose entry " +
                     blocks[v].label + " does not dominate " + blocks[u].label);
    }
    back_edges.emplace_back(blocks[u].label, blocks[v].label);
    Loop& loop = by_header[v];
    loop.header = blocks[v].label;
    loop.latches.insert(blocks[u].label);
    loop.body.insert(blocks[v].label);
    std::vector<std::string> work{blocks[u].label};
    while (!work.empty()) {
      std::string n = work.back();
      work.pop_back();
      if (!loop.body.insert(n).second) continue;
      for (const auto& p : preds[n]) work.push_back(p);
    }
  }
  for (auto& [h, loop] : by_header) loops.push_back(std::move(loop));
}

std::map<std::string, std::string> immediate_dominators(const Cfg& cfg) {
  auto succ = succ_lists(cfg);
  auto roots = compute_roots(succ);
  std::vector<std::size_t> rpo;
  std::vector<std::pair<std::size_t, std::size_t>> retreating;
  dfs(succ, roots, rpo, retreating);
  DomTree dom = dominators(succ, roots, rpo);
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
    out[cfg.blocks[i].label] =
        dom.idom[i] == kRoot ? std::string() : cfg.blocks[dom.idom[i]].label;
  }
  return out;
}

std::vector<std::string> Cfg::topological_order() const {
  std::map<std::string, std::size_t> indeg;
  for (const auto& b : blocks) indeg[b.label] = preds.at(b.label).size();
  std::vector<std::string> out;
  std::vector<bool> done(blocks.size(), false);
  // Kahn's algorithm, always taking the earliest ready block in block order.
  while (out.size() < blocks.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (done[i] || indeg[blocks[i].label] != 0) continue;
      done[i] = true;
      out.push_back(blocks[i].label);
      for (const auto& s : succs.at(blocks[i].label)) --indeg[s];
      progressed = true;
      break;
    }
    if (!progressed) throw CfgError("control-flow graph of " + proc + " is cyclic");
  }
  return out;
}

bool Cfg::is_acyclic() const {
  try {
    topological_order();
    return true;
  } catch (const CfgError&) {
    return false;
  }
}

Procedure Cfg::to_procedure() const {
  Procedure p;
  p.name = proc;
  p.params = params;
  p.returns = returns;
  p.blocks = blocks;
  return p;
}

Cfg build_cfg(const Procedure& proc) {
  Cfg cfg;
  cfg.proc = proc.name;
  cfg.params = proc.params;
  cfg.returns = proc.returns;
  cfg.blocks = proc.blocks;
  for (const auto& b : proc.blocks) cfg.origin[b.label] = Origin{proc.name, b.label};
  cfg.analyze();
  return cfg;
}

}  // namespace covgen
