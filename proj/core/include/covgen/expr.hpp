#pragma once

// Sorted term trees shared by the source language and the verification
// conditions. Nodes are immutable and may be shared, so a term is a DAG.

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace covgen {

using Int = boost::multiprecision::cpp_int;

enum class Sort { Int, Bool };

enum class Op {
  IntLit,
  BoolLit,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  Not,
  And,
  Or,
  Implies,
  Iff,
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  struct Private;  // construction only through the factories below

  Expr(Private, Op op, Int value, bool flag, std::string name, Sort var_sort,
       std::vector<ExprPtr> args);

  Op op() const noexcept { return op_; }
  const Int& int_value() const noexcept { return value_; }
  bool bool_value() const noexcept { return flag_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<ExprPtr>& args() const noexcept { return args_; }
  const ExprPtr& arg(std::size_t i) const { return args_.at(i); }

  /// Result sort as determined by the operator (variables carry their own).
  Sort sort() const noexcept;

  bool is_atom() const noexcept {
    return op_ == Op::IntLit || op_ == Op::BoolLit || op_ == Op::Var;
  }

 private:
  Op op_;
  Int value_;
  bool flag_;
  std::string name_;
  Sort var_sort_;
  std::vector<ExprPtr> args_;
};

// Raw constructors: build exactly the requested node.
ExprPtr int_lit(Int value);
ExprPtr bool_lit(bool value);
ExprPtr var(std::string name, Sort sort = Sort::Int);
ExprPtr make(Op op, std::vector<ExprPtr> args);
ExprPtr unary(Op op, ExprPtr a);
ExprPtr binary(Op op, ExprPtr a, ExprPtr b);

// Formula builders with light constant folding; conj/disj flatten nested
// conjunctions/disjunctions. Empty conj is true, empty disj is false.
ExprPtr conj(std::vector<ExprPtr> parts);
ExprPtr disj(std::vector<ExprPtr> parts);
ExprPtr negate(ExprPtr a);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr iff(ExprPtr a, ExprPtr b);
ExprPtr equal(ExprPtr a, ExprPtr b);

bool is_true(const ExprPtr& e);
bool is_false(const ExprPtr& e);

/// Deep structural equality.
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

using Value = std::variant<Int, bool>;
using Valuation = std::map<std::string, Value>;

/// Evaluates `e`; `lookup` returns nullopt for unbound variables, which
/// raises InputError.
Value evaluate(const ExprPtr& e,
               const std::function<std::optional<Value>(const std::string&)>&
                   lookup);
Value evaluate(const ExprPtr& e, const Valuation& valuation);
bool evaluate_bool(const ExprPtr& e, const Valuation& valuation);

/// Simultaneous substitution of variables by terms. Shared subterms stay
/// shared in the result.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& map);

/// Renames variables; names absent from `rename` are kept.
ExprPtr rename_vars(const ExprPtr& e,
                    const std::function<std::string(const std::string&)>& rename);

/// Free variables with their sorts.
void collect_vars(const ExprPtr& e, std::map<std::string, Sort>& out);

/// Number of nodes counted as a tree (shared subterms counted once per use).
std::size_t tree_size(const ExprPtr& e);

/// True when some product has more than one factor mentioning a variable.
bool is_nonlinear(const ExprPtr& e);

/// Source-language rendering with minimal parentheses.
std::string to_source(const ExprPtr& e);

/// SMT-LIB 2 rendering. Shared non-atomic subterms are bound with `let`.
std::string to_smtlib(const ExprPtr& e);

std::string to_string(const Int& v);
std::string to_string(const Value& v);

}  // namespace covgen
