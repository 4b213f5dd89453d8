#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "covgen/parser.hpp"
#include "covgen/sema.hpp"
#include "covgen/solver.hpp"

namespace covgen::test {

inline std::string data_path(const std::string& name) {
  return std::string(COVGEN_TEST_DATA) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program load(const std::string& name) {
  return check_semantics(parse_program(read_text(data_path(name))));
}

inline Program program(const std::string& text) { return check_semantics(parse_program(text)); }

// Solver under test: $COVGEN_SOLVER, else the configured default.
inline SolverOptions solver_options() {
  SolverOptions o;
  const char* env = std::getenv("COVGEN_SOLVER");
  o.command = env && *env ? env : COVGEN_SOLVER_DEFAULT;
  o.verify_models = true;
  return o;
}

}  // namespace covgen::test
