#include "covgen/ast.hpp"

#include <sstream>

namespace covgen {

bool operator==(const Assign& a, const Assign& b) {
  return a.target == b.target && structurally_equal(a.rhs, b.rhs);
}

bool operator==(const Assume& a, const Assume& b) {
  return structurally_equal(a.cond, b.cond);
}

bool operator==(const Call& a, const Call& b) {
  if (a.target != b.target || a.callee != b.callee ||
      a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

const Block* Procedure::find_block(const std::string& label) const {
  for (const auto& b : blocks) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

const Procedure* Program::find(const std::string& name) const {
  for (const auto& p : procedures) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string print_stmt(const Stmt& s) {
  std::ostringstream os;
  if (const auto* a = std::get_if<Assign>(&s)) {
    os << a->target << " := " << to_source(a->rhs) << ';';
  } else if (const auto* a = std::get_if<Assume>(&s)) {
    os << "assume " << to_source(a->cond) << ';';
  } else {
    const auto& c = std::get<Call>(s);
    if (c.target) os << *c.target << " := ";
    os << "call " << c.callee << '(';
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) os << ", ";
      os << to_source(c.args[i]);
    }
    os << ");";
  }
  return os.str();
}

std::string print_procedure(const Procedure& p) {
  std::ostringstream os;
  os << "proc " << p.name << '(';
  for (std::size_t i = 0; i < p.params.size(); ++i) {
    if (i) os << ", ";
    os << p.params[i];
  }
  os << ')';
  if (p.returns) os << " returns " << *p.returns;
  os << " {\n";
  for (const auto& b : p.blocks) {
    os << "  " << b.label << ":\n";
    for (const auto& s : b.stmts) os << "    " << print_stmt(s) << '\n';
    if (!b.succs.empty()) {
      os << "    goto ";
      for (std::size_t i = 0; i < b.succs.size(); ++i) {
        if (i) os << ", ";
        os << b.succs[i];
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string print_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.procedures.size(); ++i) {
    if (i) out += '\n';
    out += print_procedure(p.procedures[i]);
  }
  return out;
}

void collect_reads(const Stmt& s, std::vector<std::string>& out) {
  std::map<std::string, Sort> vars;
  if (const auto* a = std::get_if<Assign>(&s)) {
    collect_vars(a->rhs, vars);
  } else if (const auto* a = std::get_if<Assume>(&s)) {
    collect_vars(a->cond, vars);
  } else {
    for (const auto& e : std::get<Call>(s).args) collect_vars(e, vars);
  }
  for (auto& [name, sort] : vars) out.push_back(name);
}

}  // namespace covgen
