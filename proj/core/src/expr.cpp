#include "covgen/expr.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "covgen/error.hpp"

namespace covgen {

struct Expr::Private {};

Expr::Expr(Private, Op op, Int value, bool flag, std::string name,
           Sort var_sort, std::vector<ExprPtr> args)
    : op_(op),
      value_(std::move(value)),
      flag_(flag),
      name_(std::move(name)),
      var_sort_(var_sort),
      args_(std::move(args)) {}

Sort Expr::sort() const noexcept {
  switch (op_) {
    case Op::IntLit:
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      return Sort::Int;
    case Op::Var:
      return var_sort_;
    default:
      return Sort::Bool;
  }
}

namespace {

ExprPtr node(Op op, Int value, bool flag, std::string name, Sort sort,
             std::vector<ExprPtr> args) {
  return std::make_shared<const Expr>(Expr::Private{}, op, std::move(value),
                                      flag, std::move(name), sort,
                                      std::move(args));
}

}  // namespace

ExprPtr int_lit(Int value) {
  return node(Op::IntLit, std::move(value), false, {}, Sort::Int, {});
}

ExprPtr bool_lit(bool value) {
  return node(Op::BoolLit, 0, value, {}, Sort::Bool, {});
}

ExprPtr var(std::string name, Sort sort) {
  return node(Op::Var, 0, false, std::move(name), sort, {});
}

ExprPtr make(Op op, std::vector<ExprPtr> args) {
  return node(op, 0, false, {}, Sort::Bool, std::move(args));
}

ExprPtr unary(Op op, ExprPtr a) { return make(op, {std::move(a)}); }

ExprPtr binary(Op op, ExprPtr a, ExprPtr b) {
  return make(op, {std::move(a), std::move(b)});
}

bool is_true(const ExprPtr& e) {
  return e->op() == Op::BoolLit && e->bool_value();
}

bool is_false(const ExprPtr& e) {
  return e->op() == Op::BoolLit && !e->bool_value();
}

ExprPtr conj(std::vector<ExprPtr> parts) {
  std::vector<ExprPtr> flat;
  for (auto& p : parts) {
    if (is_true(p)) continue;
    if (is_false(p)) return bool_lit(false);
    if (p->op() == Op::And) {
      flat.insert(flat.end(), p->args().begin(), p->args().end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return bool_lit(true);
  if (flat.size() == 1) return flat.front();
  return make(Op::And, std::move(flat));
}

ExprPtr disj(std::vector<ExprPtr> parts) {
  std::vector<ExprPtr> flat;
  for (auto& p : parts) {
    if (is_false(p)) continue;
    if (is_true(p)) return bool_lit(true);
    if (p->op() == Op::Or) {
      flat.insert(flat.end(), p->args().begin(), p->args().end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return bool_lit(false);
  if (flat.size() == 1) return flat.front();
  return make(Op::Or, std::move(flat));
}

ExprPtr negate(ExprPtr a) {
  if (a->op() == Op::BoolLit) return bool_lit(!a->bool_value());
  if (a->op() == Op::Not) return a->arg(0);
  return unary(Op::Not, std::move(a));
}

ExprPtr implies(ExprPtr a, ExprPtr b) {
  if (is_true(a)) return b;
  if (is_false(a) || is_true(b)) return bool_lit(true);
  return binary(Op::Implies, std::move(a), std::move(b));
}

ExprPtr iff(ExprPtr a, ExprPtr b) { return binary(Op::Iff, std::move(a), std::move(b)); }

ExprPtr equal(ExprPtr a, ExprPtr b) { return binary(Op::Eq, std::move(a), std::move(b)); }

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op() != b->op()) return false;
  switch (a->op()) {
    case Op::IntLit:
      return a->int_value() == b->int_value();
    case Op::BoolLit:
      return a->bool_value() == b->bool_value();
    case Op::Var:
      return a->name() == b->name() && a->sort() == b->sort();
    default:
      break;
  }
  if (a->args().size() != b->args().size()) return false;
  for (std::size_t i = 0; i < a->args().size(); ++i) {
    if (!structurally_equal(a->arg(i), b->arg(i))) return false;
  }
  return true;
}

namespace {

const Int& as_int(const Value& v) {
  if (const auto* i = std::get_if<Int>(&v)) return *i;
  throw InternalError("sort mismatch during evaluation: expected integer");
}

bool as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw InternalError("sort mismatch during evaluation: expected boolean");
}

class Evaluator {
 public:
  explicit Evaluator(
      const std::function<std::optional<Value>(const std::string&)>& lookup)
      : lookup_(lookup) {}

  Value eval(const ExprPtr& e) {
    if (e->is_atom()) return eval_node(*e);
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Value v = eval_node(*e);
    memo_.emplace(e.get(), v);
    return v;
  }

 private:
  Value eval_node(const Expr& e) {
    switch (e.op()) {
      case Op::IntLit:
        return e.int_value();
      case Op::BoolLit:
        return e.bool_value();
      case Op::Var: {
        auto v = lookup_(e.name());
        if (!v) throw InputError("unbound variable " + e.name());
        return *v;
      }
      case Op::Neg:
        return Int(-as_int(eval(e.arg(0))));
      case Op::Add:
        return Int(as_int(eval(e.arg(0))) + as_int(eval(e.arg(1))));
      case Op::Sub:
        return Int(as_int(eval(e.arg(0))) - as_int(eval(e.arg(1))));
      case Op::Mul:
        return Int(as_int(eval(e.arg(0))) * as_int(eval(e.arg(1))));
      case Op::Lt:
        return as_int(eval(e.arg(0))) < as_int(eval(e.arg(1)));
      case Op::Le:
        return as_int(eval(e.arg(0))) <= as_int(eval(e.arg(1)));
      case Op::Gt:
        return as_int(eval(e.arg(0))) > as_int(eval(e.arg(1)));
      case Op::Ge:
        return as_int(eval(e.arg(0))) >= as_int(eval(e.arg(1)));
      case Op::Eq:
      case Op::Ne: {
        Value a = eval(e.arg(0));
        Value b = eval(e.arg(1));
        bool same = a == b;
        return e.op() == Op::Eq ? same : !same;
      }
      case Op::Not:
        return !as_bool(eval(e.arg(0)));
      case Op::And:
        for (const auto& a : e.args()) {
          if (!as_bool(eval(a))) return false;
        }
        return true;
      case Op::Or:
        for (const auto& a : e.args()) {
          if (as_bool(eval(a))) return true;
        }
        return false;
      case Op::Implies:
        return !as_bool(eval(e.arg(0))) || as_bool(eval(e.arg(1)));
      case Op::Iff:
        return as_bool(eval(e.arg(0))) == as_bool(eval(e.arg(1)));
    }
    throw InternalError("unknown operator");
  }

  const std::function<std::optional<Value>(const std::string&)>& lookup_;
  std::unordered_map<const Expr*, Value> memo_;
};

}  // namespace

Value evaluate(const ExprPtr& e,
               const std::function<std::optional<Value>(const std::string&)>&
                   lookup) {
  Evaluator ev(lookup);
  return ev.eval(e);
}

Value evaluate(const ExprPtr& e, const Valuation& valuation) {
  return evaluate(e, [&](const std::string& n) -> std::optional<Value> {
    auto it = valuation.find(n);
    if (it == valuation.end()) return std::nullopt;
    return it->second;
  });
}

bool evaluate_bool(const ExprPtr& e, const Valuation& valuation) {
  return as_bool(evaluate(e, valuation));
}

namespace {

ExprPtr rebuild(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& leaf,
                std::unordered_map<const Expr*, ExprPtr>& memo) {
  if (e->op() == Op::Var) return leaf(e);
  if (e->is_atom()) return e;
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  std::vector<ExprPtr> args;
  args.reserve(e->args().size());
  bool changed = false;
  for (const auto& a : e->args()) {
    args.push_back(rebuild(a, leaf, memo));
    changed = changed || args.back() != a;
  }
  ExprPtr out = changed ? make(e->op(), std::move(args)) : e;
  memo.emplace(e.get(), out);
  return out;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& map) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  return rebuild(
      e,
      [&](const ExprPtr& v) {
        auto it = map.find(v->name());
        return it == map.end() ? v : it->second;
      },
      memo);
}

ExprPtr rename_vars(const ExprPtr& e,
                    const std::function<std::string(const std::string&)>& rename) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  return rebuild(
      e,
      [&](const ExprPtr& v) {
        std::string n = rename(v->name());
        return n == v->name() ? v : var(std::move(n), v->sort());
      },
      memo);
}

void collect_vars(const ExprPtr& e, std::map<std::string, Sort>& out) {
  std::unordered_set<const Expr*> seen;
  std::vector<const Expr*> stack{e.get()};
  while (!stack.empty()) {
    const Expr* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->op() == Op::Var) out.emplace(n->name(), n->sort());
    for (const auto& a : n->args()) stack.push_back(a.get());
  }
}

std::size_t tree_size(const ExprPtr& e) {
  std::size_t n = 1;
  for (const auto& a : e->args()) n += tree_size(a);
  return n;
}

bool is_nonlinear(const ExprPtr& e) {
  std::vector<const Expr*> stack{e.get()};
  std::unordered_set<const Expr*> seen;
  while (!stack.empty()) {
    const Expr* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->op() == Op::Mul) {
      int symbolic = 0;
      for (const auto& a : n->args()) {
        std::map<std::string, Sort> vars;
        collect_vars(a, vars);
        if (!vars.empty()) ++symbolic;
      }
      if (symbolic > 1) return true;
    }
    for (const auto& a : n->args()) stack.push_back(a.get());
  }
  return false;
}

std::string to_string(const Int& v) { return v.str(); }

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<Int>(&v)) return i->str();
  return std::get<bool>(v) ? "true" : "false";
}

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Iff:
    case Op::Implies:
      return 0;
    case Op::Or:
      return 1;
    case Op::And:
      return 2;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
      return 3;
    case Op::Add:
    case Op::Sub:
      return 4;
    case Op::Mul:
      return 5;
    case Op::Neg:
    case Op::Not:
      return 6;
    case Op::IntLit:
      return e.int_value() < 0 ? 6 : 7;
    default:
      return 7;
  }
}

const char* infix(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "==>";
    case Op::Iff: return "<==>";
    default: return "?";
  }
}

void print_source(const Expr& e, std::ostream& os) {
  switch (e.op()) {
    case Op::IntLit:
      os << e.int_value();
      return;
    case Op::BoolLit:
      os << (e.bool_value() ? "true" : "false");
      return;
    case Op::Var:
      os << e.name();
      return;
    case Op::Neg:
    case Op::Not: {
      os << (e.op() == Op::Neg ? "-" : "!");
      const Expr& c = *e.arg(0);
      bool paren = precedence(c) < 6 || c.op() == Op::Neg ||
                   (c.op() == Op::IntLit && c.int_value() < 0);
      if (paren) os << '(';
      print_source(c, os);
      if (paren) os << ')';
      return;
    }
    default:
      break;
  }
  const int p = precedence(e);
  const bool always_paren = e.op() == Op::Implies || e.op() == Op::Iff;
  for (std::size_t i = 0; i < e.args().size(); ++i) {
    const Expr& c = *e.arg(i);
    if (i > 0) os << ' ' << infix(e.op()) << ' ';
    bool paren = always_paren || (i == 0 ? precedence(c) < p : precedence(c) <= p);
    if (paren) os << '(';
    print_source(c, os);
    if (paren) os << ')';
  }
}

const char* smt_head(Op op) {
  switch (op) {
    case Op::Neg: return "-";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "=";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Iff: return "=";
    default: return "?";
  }
}

class SmtPrinter {
 public:
  std::string print(const ExprPtr& root) {
    count(root.get());
    std::vector<const Expr*> order;
    std::unordered_set<const Expr*> done;
    post_order(root.get(), done, order);
    std::ostringstream os;
    std::size_t lets = 0;
    for (const Expr* n : order) {
      if (n == root.get() || uses_[n] < 2) continue;
      std::string name = "?s" + std::to_string(names_.size());
      os << "(let ((" << name << ' ';
      emit(*n, os, /*top=*/true);
      os << ")) ";
      names_.emplace(n, std::move(name));
      ++lets;
    }
    emit(*root, os, /*top=*/true);
    for (std::size_t i = 0; i < lets; ++i) os << ')';
    return os.str();
  }

 private:
  void count(const Expr* n) {
    if (n->is_atom()) return;
    if (++uses_[n] > 1) return;
    for (const auto& a : n->args()) count(a.get());
  }

  void post_order(const Expr* n, std::unordered_set<const Expr*>& done,
                  std::vector<const Expr*>& out) {
    if (n->is_atom() || !done.insert(n).second) return;
    for (const auto& a : n->args()) post_order(a.get(), done, out);
    out.push_back(n);
  }

  void emit(const Expr& e, std::ostream& os, bool top) {
    if (!top) {
      auto it = names_.find(&e);
      if (it != names_.end()) {
        os << it->second;
        return;
      }
    }
    switch (e.op()) {
      case Op::IntLit:
        if (e.int_value() < 0) {
          os << "(- " << Int(-e.int_value()) << ')';
        } else {
          os << e.int_value();
        }
        return;
      case Op::BoolLit:
        os << (e.bool_value() ? "true" : "false");
        return;
      case Op::Var:
        os << e.name();
        return;
      case Op::Ne:
        os << "(not (= ";
        emit(*e.arg(0), os, false);
        os << ' ';
        emit(*e.arg(1), os, false);
        os << "))";
        return;
      default:
        break;
    }
    os << '(' << smt_head(e.op());
    for (const auto& a : e.args()) {
      os << ' ';
      emit(*a, os, false);
    }
    os << ')';
  }

  std::unordered_map<const Expr*, std::size_t> uses_;
  std::unordered_map<const Expr*, std::string> names_;
};

}  // namespace

std::string to_source(const ExprPtr& e) {
  std::ostringstream os;
  print_source(*e, os);
  return os.str();
}

std::string to_smtlib(const ExprPtr& e) {
  SmtPrinter p;
  return p.print(e);
}

}  // namespace covgen
