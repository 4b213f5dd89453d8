#include "covgen/generator.hpp"

#include <sstream>
#include <utility>
#include <vector>

#include "covgen/expr.hpp"

namespace covgen {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::int64_t SplitMix64::uniform(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next() % span);
}

namespace {

// A linear term: sum of coef * v<var> plus a constant.
struct Linear {
  std::vector<std::pair<int, unsigned>> terms;
  int constant = 0;
};

// Programs are written alongside one concrete run from a random initial
// state. Extra assumes on that run are chosen to hold, so every program has
// at least one feasible complete path.
class Writer {
 public:
  Writer(const GenConfig& c, SplitMix64& rng, unsigned vars) : c_(c), rng_(rng), vars_(vars) {}

  unsigned var() { return static_cast<unsigned>(rng_.uniform(0, vars_ - 1)); }

  int coef() {
    int k = 0;
    while (k == 0) k = static_cast<int>(rng_.uniform(c_.coef_min, c_.coef_max));
    return k;
  }

  int constant() { return static_cast<int>(rng_.uniform(c_.const_min, c_.const_max)); }

  // One or two scaled variables.
  Linear linear() {
    Linear l;
    const int terms = static_cast<int>(rng_.uniform(1, 2));
    for (int i = 0; i < terms; ++i) {
      int k = coef();
      l.terms.emplace_back(k, var());
    }
    return l;
  }

  static std::string name(unsigned v) { return "v" + std::to_string(v); }

  static std::string render_terms(const Linear& l) {
    std::string out;
    for (std::size_t i = 0; i < l.terms.size(); ++i) {
      auto [k, v] = l.terms[i];
      if (i == 0) {
        if (k == 1) out = name(v);
        else if (k == -1) out = "-" + name(v);
        else out = std::to_string(k) + " * " + name(v);
      } else {
        out += k < 0 ? " - " : " + ";
        int a = k < 0 ? -k : k;
        out += a == 1 ? name(v) : std::to_string(a) + " * " + name(v);
      }
    }
    return out;
  }

  Int eval(const Linear& l) const {
    Int sum = l.constant;
    for (auto [k, v] : l.terms) sum += Int(k) * state_[v];
    return sum;
  }

  std::string assignment(bool on_path) {
    const unsigned target = var();
    Linear rhs;
    std::string text;
    if (rng_.chance(c_.const_assign_percent)) {
      rhs.constant = constant();
      text = std::to_string(rhs.constant);
    } else {
      rhs = linear();
      rhs.constant = constant();
      text = render_terms(rhs);
      if (rhs.constant > 0) text += " + " + std::to_string(rhs.constant);
      if (rhs.constant < 0) text += " - " + std::to_string(-rhs.constant);
    }
    if (on_path) state_[target] = eval(rhs);
    return name(target) + " := " + text + ";";
  }

  // Complementary pair "e < c" / "e >= c"; `holds` tells whether the first
  // one is true in the current state.
  std::pair<std::string, std::string> guards(bool& holds) {
    Linear e = linear();
    const int k = constant();
    holds = eval(e) < k;
    const std::string lhs = render_terms(e), rhs = std::to_string(k);
    return {"assume " + lhs + " < " + rhs + ";", "assume " + lhs + " >= " + rhs + ";"};
  }

  std::string extra_assume(bool on_path) {
    static const char* ops[] = {"<", "<=", ">", ">="};
    Linear e = linear();
    const int k = constant();
    int op = static_cast<int>(rng_.uniform(0, 3));
    if (on_path) {
      const Int v = eval(e);
      const bool ok = op == 0 ? v < k : op == 1 ? v <= k : op == 2 ? v > k : v >= k;
      if (!ok) op = 3 - op;  // < and >=, <= and > are complements
    }
    return "assume " + render_terms(e) + " " + ops[op] + " " + std::to_string(k) + ";";
  }

  void block(const std::string& label, const std::vector<std::string>& stmts,
             const std::vector<std::string>& succs) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      os_ << (i == 0 ? "  " + label + ": " : "    ") << stmts[i] << "\n";
    }
    if (stmts.empty()) os_ << "  " << label << ":\n";
    if (!succs.empty()) {
      os_ << "    goto ";
      for (std::size_t i = 0; i < succs.size(); ++i) os_ << (i ? ", " : "") << succs[i];
      os_ << ";\n";
    }
  }

  std::vector<std::string> plain_stmts(unsigned n, bool on_path) {
    std::vector<std::string> out;
    for (unsigned i = 0; i < n; ++i) out.push_back(assignment(on_path));
    return out;
  }

  // A guarded branch block: the guard, then assignments with possibly one
  // replaced by an extra assume.
  std::vector<std::string> branch_stmts(const std::string& guard, bool on_path) {
    std::vector<std::string> out{guard};
    const unsigned rest = c_.stmts_per_block > 0 ? c_.stmts_per_block - 1 : 0;
    const bool extra = rest > 0 && rng_.chance(c_.extra_assume_percent);
    const unsigned slot = extra ? static_cast<unsigned>(rng_.uniform(0, rest - 1)) : rest;
    for (unsigned i = 0; i < rest; ++i) {
      out.push_back(i == slot ? extra_assume(on_path) : assignment(on_path));
    }
    return out;
  }

  // Emits the region rooted at `label`; every path through it ends in `next`.
  void region(const std::string& label, unsigned depth, const std::string* guard,
              const std::string& next, bool top, const std::string& counter, bool on_path) {
    std::vector<std::string> stmts =
        guard ? branch_stmts(*guard, on_path) : plain_stmts(c_.stmts_per_block, on_path);
    if (!counter.empty() && label.size() >= 2 && !on_path) {
      // Loop-only blocks: reachable after one or two trips round the loop.
      const std::string tail = label.substr(label.size() - 2);
      if (tail == "te") stmts.push_back("assume " + counter + " >= 1;");
      if (tail == "ee") stmts.push_back("assume " + counter + " >= 2;");
    }
    if (depth == 0) {
      block(label, stmts, {next});
      return;
    }
    bool holds = false;
    auto [g, not_g] = guards(holds);
    const std::string join = top ? next : label + "j";
    block(label, stmts, {label + "t", label + "e"});
    region(label + "t", depth - 1, &g, join, false, counter, on_path && holds);
    region(label + "e", depth - 1, &not_g, join, false, counter, on_path && !holds);
    if (!top) {
      std::vector<std::string> js = plain_stmts(c_.stmts_per_block, on_path);
      std::vector<std::string> succs{next};
      if (!counter.empty() && label.size() >= 2 && label.substr(label.size() - 1) == "t" &&
          label.find('t') == label.size() - 1) {
        js.insert(js.begin(), counter + " := " + counter + " + 1;");
        succs.push_back(loop_head_);
      }
      block(join, js, succs);
    }
  }

  std::string run() {
    for (unsigned v = 0; v < vars_; ++v) state_.push_back(Int(rng_.uniform(c_.const_min, c_.const_max)));
    os_ << "// random program: diamonds=" << c_.diamonds << " depth=" << c_.nesting_depth
        << " seed=" << c_.seed << " vars=" << vars_ << "\n\n";
    os_ << "proc main() {\n";
    for (unsigned d = 0; d < c_.diamonds; ++d) {
      const std::string head = "d" + std::to_string(d);
      const bool loopy = d < c_.loops;
      const std::string counter = loopy ? "n" + std::to_string(d) : "";
      std::string next = "done";
      if (d + 1 < c_.diamonds) {
        next = "d" + std::to_string(d + 1) + (d + 1 < c_.loops ? "p" : "");
      }
      if (d > 0) os_ << "\n";
      if (loopy) block(head + "p", {counter + " := 0;"}, {head});
      loop_head_ = head;
      region(head, c_.nesting_depth, nullptr, next, true, counter, true);
    }
    os_ << "\n";
    block("done", plain_stmts(c_.stmts_per_block, true), {});
    os_ << "}\n";
    return os_.str();
  }

 private:
  const GenConfig& c_;
  SplitMix64& rng_;
  unsigned vars_;
  std::vector<Int> state_;  // the concrete run
  std::string loop_head_;
  std::ostringstream os_;
};

}  // namespace

std::string gen_program(const GenConfig& config) {
  SplitMix64 rng(config.seed);
  const unsigned vars = config.num_vars ? *config.num_vars : static_cast<unsigned>(rng.uniform(10, 20));
  Writer w(config, rng, vars);
  return w.run();
}

}  // namespace covgen
