#pragma once

#include <set>
#include <string>

#include "covgen/ast.hpp"

namespace covgen {

/// Validates a parsed program: a `main` procedure exists, every call names a
/// procedure with matching arity, call results are only bound when the callee
/// returns a value, and expressions are sort-correct (assume conditions are
/// boolean; assigned values and call arguments are integers). Returns the
/// program unchanged on success, throws SemanticError otherwise.
Program check_semantics(Program p);

/// Sort of a source expression; throws SemanticError on sort errors.
Sort check_expr(const ExprPtr& e);

/// All variables a procedure mentions (params, return variable, reads, writes).
std::set<std::string> procedure_variables(const Procedure& p);

}  // namespace covgen
