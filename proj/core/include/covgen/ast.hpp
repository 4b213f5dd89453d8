#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "covgen/expr.hpp"

namespace covgen {

struct Assign {
  std::string target;
  ExprPtr rhs;
};

struct Assume {
  ExprPtr cond;
};

/// `[target :=] call callee(args);`
struct Call {
  std::optional<std::string> target;
  std::string callee;
  std::vector<ExprPtr> args;
};

bool operator==(const Assign& a, const Assign& b);
bool operator==(const Assume& a, const Assume& b);
bool operator==(const Call& a, const Call& b);

using Stmt = std::variant<Assign, Assume, Call>;

struct Block {
  std::string label;
  std::vector<Stmt> stmts;
  std::vector<std::string> succs;  // empty: sink

  bool operator==(const Block&) const = default;
};

struct Procedure {
  std::string name;
  std::vector<std::string> params;
  std::optional<std::string> returns;
  std::vector<Block> blocks;

  const Block* find_block(const std::string& label) const;
  bool operator==(const Procedure&) const = default;
};

struct Program {
  std::vector<Procedure> procedures;

  const Procedure* find(const std::string& name) const;
  bool operator==(const Program&) const = default;
};

std::string print_stmt(const Stmt& s);
std::string print_procedure(const Procedure& p);
std::string print_program(const Program& p);

/// Variables read by a statement (assignment targets excluded).
void collect_reads(const Stmt& s, std::vector<std::string>& out);

}  // namespace covgen
