#pragma once

// Minimal S-expression reader for solver replies.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covgen {

struct SExpr {
  bool atom = true;
  std::string text;            // atom text; string literals keep their quotes
  std::vector<SExpr> items;    // list elements

  bool is(std::string_view s) const { return atom && text == s; }
  std::string str() const;
};

/// Length of the first complete S-expression in `buf` (leading blanks and
/// `;` comment lines included), or nullopt when more input is needed. An
/// atom counts as complete only once a delimiter follows it.
std::optional<std::size_t> complete_sexpr(std::string_view buf);

/// Parses exactly one S-expression. Throws std::invalid_argument.
SExpr parse_sexpr(std::string_view text);

}  // namespace covgen
