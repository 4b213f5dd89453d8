#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covgen {

/// Base class of every error the library reports. `stage()` names the
/// pipeline stage that failed so the CLI can prefix diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("parse", std::to_string(line) + ":" + std::to_string(column) +
                           ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SemanticError : public Error {
 public:
  explicit SemanticError(const std::string& msg) : Error("check", msg) {}
};

class CfgError : public Error {
 public:
  explicit CfgError(const std::string& msg) : Error("cfg", msg) {}
};

/// Bad arguments handed to the interpreter (non-adjacent path, unbound read).
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error("exec", msg) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& msg) : Error("solver", msg) {}
};

/// Broken internal invariant (e.g. a Call statement reaching vcgen).
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& msg) : Error("internal", msg) {}
};

}  // namespace covgen
