#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "covgen/expr.hpp"

namespace covgen {

struct SolverOptions {
  std::string command = "z3 -in smt.phase_selection=5";  // split on blanks; '...' and "..." group
  std::string logic = "QF_LIA";
  double timeout_s = 60.0;          // per query
  /// Fetch a full model after every sat answer and evaluate every active
  /// assertion and assumption under it with the internal evaluator.
  bool verify_models = false;
};

enum class CheckStatus { Sat, Unsat, Timeout, Unknown };

using Model = std::map<std::string, Value>;

struct CheckResult {
  CheckStatus status = CheckStatus::Unknown;
  Model model;  // exactly the wanted variables when sat

  bool sat() const { return status == CheckStatus::Sat; }
  bool unsat() const { return status == CheckStatus::Unsat; }
  /// Neither sat nor unsat; the enclosing algorithm stops incomplete.
  bool inconclusive() const { return !sat() && !unsat(); }
};

struct SolverStats {
  std::size_t queries = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t timeouts = 0;  // includes "unknown" answers
  double time_ms = 0;        // spent waiting on check-sat and get-value
  std::size_t model_checks = 0;
  std::size_t model_check_failures = 0;

  SolverStats& operator+=(const SolverStats& o);
};

/// `options` with QF_LIA widened to QF_NIA when `nonlinear` is set.
SolverOptions logic_for(SolverOptions options, bool nonlinear);

/// Splits a command line into argv words.
std::vector<std::string> split_command(const std::string& command);

/// One external SMT-LIB 2 process. Not thread-safe; distinct sessions are
/// independent processes.
class SolverSession {
 public:
  explicit SolverSession(SolverOptions options);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  /// Declarations are also emitted automatically on first use.
  void declare(const std::string& name, Sort sort);
  void assert_persistent(const ExprPtr& f);

  /// Checks the persistent assertions plus `assumptions` (not retained).
  /// On sat, the model covers exactly `wanted`.
  CheckResult checksat(const std::vector<ExprPtr>& assumptions,
                       const std::vector<std::string>& wanted);

  const SolverStats& stats() const { return stats_; }
  const SolverOptions& options() const { return options_; }
  bool alive() const { return pid_ > 0; }
  /// Last `;` comment line or error text seen from the solver.
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  void send(const std::string& line);
  std::string read_reply(double timeout_s, bool& timed_out);
  void expect_success(const std::string& command);
  void declare_all(const ExprPtr& f);
  Model get_values(const std::vector<std::string>& names, bool& timed_out);
  void kill_process();
  void verify(const Model& model, const std::vector<ExprPtr>& assumptions);

  SolverOptions options_;
  int pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::string diagnostic_;
  std::map<std::string, Sort> declared_;
  std::vector<ExprPtr> persistent_;
  std::size_t activations_ = 0;
  SolverStats stats_;
};

}  // namespace covgen
