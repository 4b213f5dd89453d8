#pragma once

#include <string_view>

#include "covgen/ast.hpp"

namespace covgen {

/// Parses the `.sl` concrete syntax. Throws ParseError (with line/column) on
/// lexical or syntax errors, duplicate procedures or labels, and goto
/// targets that do not name a block of the same procedure.
Program parse_program(std::string_view text);

/// Parses a single expression (used by tests and the CLI).
ExprPtr parse_expr(std::string_view text);

}  // namespace covgen
