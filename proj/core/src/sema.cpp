#include "covgen/sema.hpp"

#include "covgen/error.hpp"

namespace covgen {
namespace {

const char* sort_name(Sort s) { return s == Sort::Int ? "integer" : "boolean"; }

void expect_sort(const ExprPtr& e, Sort want) {
  Sort got = check_expr(e);
  if (got != want) {
    throw SemanticError(std::string("sort error: expected ") + sort_name(want) +
                        " expression, found " + sort_name(got) + " '" +
                        to_source(e) + "'");
  }
}

}  // namespace

Sort check_expr(const ExprPtr& e) {
  switch (e->op()) {
    case Op::IntLit:
      return Sort::Int;
    case Op::BoolLit:
      return Sort::Bool;
    case Op::Var:
      if (e->sort() != Sort::Int) {
        throw SemanticError("sort error: variable " + e->name() +
                            " must be an integer");
      }
      return Sort::Int;
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      for (const auto& a : e->args()) expect_sort(a, Sort::Int);
      return Sort::Int;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
      for (const auto& a : e->args()) expect_sort(a, Sort::Int);
      return Sort::Bool;
    case Op::Not:
    case Op::And:
    case Op::Or:
      for (const auto& a : e->args()) expect_sort(a, Sort::Bool);
      return Sort::Bool;
    case Op::Implies:
    case Op::Iff:
      throw SemanticError("operator not available in source programs");
  }
  throw InternalError("unknown operator");
}

Program check_semantics(Program p) {
  if (!p.find("main")) throw SemanticError("no procedure named main");
  for (const auto& proc : p.procedures) {
    for (const auto& b : proc.blocks) {
      const std::string where = " (procedure " + proc.name + ", block " + b.label + ")";
      for (const auto& s : b.stmts) {
        try {
          if (const auto* a = std::get_if<Assign>(&s)) {
            expect_sort(a->rhs, Sort::Int);
          } else if (const auto* a = std::get_if<Assume>(&s)) {
            expect_sort(a->cond, Sort::Bool);
          } else {
            const auto& c = std::get<Call>(s);
            const Procedure* callee = p.find(c.callee);
            if (!callee) throw SemanticError("unknown callee " + c.callee);
            if (callee->params.size() != c.args.size()) {
              throw SemanticError("arity mismatch: " + c.callee + " expects " +
                                  std::to_string(callee->params.size()) +
                                  " argument(s), got " +
                                  std::to_string(c.args.size()));
            }
            if (c.target && !callee->returns) {
              throw SemanticError("procedure " + c.callee +
                                  " does not return a value");
            }
            for (const auto& arg : c.args) expect_sort(arg, Sort::Int);
          }
        } catch (const SemanticError& e) {
          throw SemanticError(e.what() + where);
        }
      }
    }
  }
  return p;
}

std::set<std::string> procedure_variables(const Procedure& p) {
  std::set<std::string> vars(p.params.begin(), p.params.end());
  if (p.returns) vars.insert(*p.returns);
  for (const auto& b : p.blocks) {
    for (const auto& s : b.stmts) {
      std::vector<std::string> reads;
      collect_reads(s, reads);
      vars.insert(reads.begin(), reads.end());
      if (const auto* a = std::get_if<Assign>(&s)) vars.insert(a->target);
      if (const auto* c = std::get_if<Call>(&s); c && c->target) {
        vars.insert(*c->target);
      }
    }
  }
  return vars;
}

}  // namespace covgen
