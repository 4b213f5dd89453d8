#include "covgen/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>
#ifdef __linux__
#include <sys/prctl.h>
#endif

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include "covgen/error.hpp"
#include "covgen/sexpr.hpp"

namespace covgen {

namespace {

using Clock = std::chrono::steady_clock;

bool is_literal(const ExprPtr& e) {
  if (e->op() == Op::Var) return e->sort() == Sort::Bool;
  return e->op() == Op::Not && e->arg(0)->op() == Op::Var;
}

Value parse_value(const SExpr& v) {
  if (v.is("true")) return true;
  if (v.is("false")) return false;
  auto digits = [](const SExpr& a) {
    return a.atom && !a.text.empty() &&
           a.text.find_first_not_of("0123456789") == std::string::npos;
  };
  if (digits(v)) return Int(v.text);
  if (!v.atom && v.items.size() == 2 && v.items[0].is("-") && digits(v.items[1])) {
    return Int(-Int(v.items[1].text));
  }
  throw SolverError("malformed model value: " + v.str());
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SolverStats& SolverStats::operator+=(const SolverStats& o) {
  queries += o.queries;
  sat += o.sat;
  unsat += o.unsat;
  timeouts += o.timeouts;
  time_ms += o.time_ms;
  model_checks += o.model_checks;
  model_check_failures += o.model_check_failures;
  return *this;
}

SolverOptions logic_for(SolverOptions options, bool nonlinear) {
  if (nonlinear && options.logic == "QF_LIA") options.logic = "QF_NIA";
  return options;
}

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> out;
  std::string cur;
  bool have = false;
  char quote = 0;
  for (char c : command) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      have = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (have) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (quote) throw SolverError("unterminated quote in solver command: " + command);
  if (have) out.push_back(cur);
  return out;
}

SolverSession::SolverSession(SolverOptions options) : options_(std::move(options)) {
  if (!(options_.timeout_s > 0)) throw SolverError("solver timeout must be positive");
  std::vector<std::string> words = split_command(options_.command);
  if (words.empty()) throw SolverError("empty solver command");
  std::vector<char*> argv;
  for (auto& w : words) argv.push_back(w.data());
  argv.push_back(nullptr);

  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw SolverError(std::string("socketpair: ") + std::strerror(errno));
  }
  // The exec status comes back over a close-on-exec pipe: EOF means exec worked.
  int status_pipe[2];
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    const int err = errno;
    ::close(sv[0]);
    ::close(sv[1]);
    throw SolverError(std::string("pipe: ") + std::strerror(err));
  }
  const pid_t parent = ::getpid();
  const pid_t pid = ::fork();
  if (pid == 0) {
#ifdef __linux__
    // do not outlive a killed covgen
    ::prctl(PR_SET_PDEATHSIG, SIGKILL);
    if (::getppid() != parent) ::_exit(127);
#endif
    ::dup2(sv[1], 0);
    ::dup2(sv[1], 1);
    ::dup2(sv[1], 2);
    ::execvp(argv[0], argv.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof err);
    ::_exit(127);
  }
  const int fork_errno = errno;
  ::close(sv[1]);
  ::close(status_pipe[1]);
  int rc = pid < 0 ? fork_errno : 0;
  if (pid > 0) {
    int err = 0;
    ssize_t n;
    while ((n = ::read(status_pipe[0], &err, sizeof err)) < 0 && errno == EINTR) {
    }
    if (n == static_cast<ssize_t>(sizeof err)) {
      rc = err;
      int st = 0;
      ::waitpid(pid, &st, 0);
    }
  }
  ::close(status_pipe[0]);
  if (rc != 0) {
    ::close(sv[0]);
    throw SolverError("cannot start solver `" + options_.command + "`: " + std::strerror(rc));
  }
  pid_ = pid;
  fd_ = sv[0];
  try {
    expect_success("(set-option :print-success true)");
    expect_success("(set-option :produce-models true)");
    expect_success("(set-logic " + options_.logic + ")");
  } catch (const SolverError& e) {
    kill_process();
    throw SolverError("solver `" + options_.command + "` failed the handshake: " + e.what());
  }
}

SolverSession::~SolverSession() { kill_process(); }

void SolverSession::kill_process() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
}

void SolverSession::send(const std::string& line) {
  if (!alive()) throw SolverError("solver session is closed");
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      std::string err = std::strerror(errno);
      kill_process();
      throw SolverError("write to solver failed: " + err +
                        (diagnostic_.empty() ? "" : " (" + diagnostic_ + ")"));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SolverSession::read_reply(double timeout_s, bool& timed_out) {
  timed_out = false;
  const auto deadline = Clock::now() + std::chrono::duration<double>(timeout_s);
  for (;;) {
    if (auto len = complete_sexpr(buffer_)) {
      std::string chunk = buffer_.substr(0, *len);
      buffer_.erase(0, *len);
      // Peel off comment lines that precede the reply.
      std::string reply;
      std::size_t pos = 0;
      while (pos < chunk.size()) {
        std::size_t nl = chunk.find('\n', pos);
        std::string line = chunk.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        std::string t = trim(line);
        if (!t.empty() && t[0] == ';' && reply.empty()) {
          diagnostic_ = t;
        } else {
          reply += line;
          reply += '\n';
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
      }
      reply = trim(reply);
      if (reply.rfind("(error", 0) == 0) diagnostic_ = reply;
      return reply;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      return {};
    }
    pollfd p{fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw SolverError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char tmp[65536];
    ssize_t n = ::recv(fd_, tmp, sizeof tmp, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SolverError(std::string("read from solver failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      std::string rest = trim(buffer_);
      buffer_.clear();
      kill_process();
      std::string msg = "solver process exited";
      if (!rest.empty()) msg += ": " + rest;
      else if (!diagnostic_.empty()) msg += ": " + diagnostic_;
      throw SolverError(msg);
    }
    buffer_.append(tmp, static_cast<std::size_t>(n));
  }
}

void SolverSession::expect_success(const std::string& command) {
  send(command);
  bool timed_out = false;
  std::string reply = read_reply(options_.timeout_s, timed_out);
  if (timed_out) {
    kill_process();
    throw SolverError("solver did not answer `" + command + "`");
  }
  if (reply != "success") {
    // Solvers often explain a refusal on a following comment line.
    std::string before = diagnostic_;
    pollfd p{fd_, POLLIN, 0};
    if (::poll(&p, 1, 200) > 0) {
      char tmp[4096];
      ssize_t n = ::recv(fd_, tmp, sizeof tmp, MSG_DONTWAIT);
      if (n > 0) buffer_.append(tmp, static_cast<std::size_t>(n));
    }
    std::size_t pos = 0;
    while (pos < buffer_.size()) {
      std::size_t nl = buffer_.find('\n', pos);
      std::string t = trim(buffer_.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
      if (!t.empty() && t[0] == ';') diagnostic_ = t;
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
    std::string msg = "solver rejected `" + command + "`: " + reply;
    if (diagnostic_ != before && diagnostic_ != reply) msg += " " + diagnostic_;
    throw SolverError(msg);
  }
}

void SolverSession::declare(const std::string& name, Sort sort) {
  auto it = declared_.find(name);
  if (it != declared_.end()) {
    if (it->second != sort) throw SolverError("variable " + name + " redeclared with another sort");
    return;
  }
  expect_success("(declare-fun " + name + " () " + (sort == Sort::Int ? "Int" : "Bool") + ")");
  declared_.emplace(name, sort);
}

void SolverSession::declare_all(const ExprPtr& f) {
  std::map<std::string, Sort> vars;
  collect_vars(f, vars);
  for (const auto& [name, sort] : vars) declare(name, sort);
}

void SolverSession::assert_persistent(const ExprPtr& f) {
  declare_all(f);
  expect_success("(assert " + to_smtlib(f) + ")");
  persistent_.push_back(f);
}

Model SolverSession::get_values(const std::vector<std::string>& names, bool& timed_out) {
  Model model;
  timed_out = false;
  if (names.empty()) return model;
  std::string cmd = "(get-value (";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) cmd += ' ';
    cmd += names[i];
  }
  cmd += "))";
  send(cmd);
  std::string reply = read_reply(options_.timeout_s, timed_out);
  if (timed_out) return model;
  SExpr e;
  try {
    e = parse_sexpr(reply);
  } catch (const std::invalid_argument& ex) {
    throw SolverError(std::string("malformed model reply: ") + ex.what());
  }
  if (e.atom) throw SolverError("malformed model reply: " + reply);
  for (const auto& pair : e.items) {
    if (pair.atom || pair.items.size() != 2 || !pair.items[0].atom) {
      throw SolverError("malformed model reply: " + reply);
    }
    model[pair.items[0].text] = parse_value(pair.items[1]);
  }
  for (const auto& n : names) {
    if (!model.count(n)) throw SolverError("model reply lacks " + n);
  }
  return model;
}

void SolverSession::verify(const Model& model, const std::vector<ExprPtr>& assumptions) {
  ++stats_.model_checks;
  Valuation val(model.begin(), model.end());
  bool ok = true;
  try {
    for (const auto& f : persistent_) ok = ok && evaluate_bool(f, val);
    for (const auto& f : assumptions) ok = ok && evaluate_bool(f, val);
  } catch (const Error&) {
    ok = false;
  }
  if (!ok) ++stats_.model_check_failures;
}

CheckResult SolverSession::checksat(const std::vector<ExprPtr>& assumptions,
                                    const std::vector<std::string>& wanted) {
  for (const auto& a : assumptions) declare_all(a);
  for (const auto& w : wanted) {
    if (!declared_.count(w)) throw SolverError("query asks for undeclared variable " + w);
  }
  // A compound assumption is guarded by a fresh activation literal, which is
  // switched off for good after the query. z3 answers these much faster than
  // a push/assert/pop scope.
  std::vector<ExprPtr> literals;
  std::vector<std::string> retired;
  for (const auto& a : assumptions) {
    if (is_literal(a)) {
      literals.push_back(a);
      continue;
    }
    std::string name = "$act" + std::to_string(++activations_);
    ExprPtr act = var(name, Sort::Bool);
    assert_persistent(implies(act, a));
    literals.push_back(act);
    retired.push_back(name);
  }
  ++stats_.queries;
  CheckResult result;
  const auto start = Clock::now();
  auto elapsed = [&] {
    stats_.time_ms += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };
  if (!literals.empty()) {
    std::string cmd = "(check-sat-assuming (";
    for (std::size_t i = 0; i < literals.size(); ++i) {
      if (i) cmd += ' ';
      cmd += to_smtlib(literals[i]);
    }
    send(cmd + "))");
  } else {
    send("(check-sat)");
  }
  bool timed_out = false;
  std::string reply = read_reply(options_.timeout_s, timed_out);
  if (timed_out) {
    elapsed();
    kill_process();
    ++stats_.timeouts;
    result.status = CheckStatus::Timeout;
    return result;
  }
  if (reply == "sat") {
    result.status = CheckStatus::Sat;
    result.model = get_values(wanted, timed_out);
    if (!timed_out && options_.verify_models) {
      std::vector<std::string> all;
      for (const auto& [name, sort] : declared_) all.push_back(name);
      Model full = get_values(all, timed_out);
      if (!timed_out) verify(full, assumptions);
    }
    elapsed();
    if (timed_out) {
      kill_process();
      ++stats_.timeouts;
      result.status = CheckStatus::Timeout;
      result.model.clear();
      return result;
    }
    ++stats_.sat;
  } else if (reply == "unsat") {
    elapsed();
    result.status = CheckStatus::Unsat;
    ++stats_.unsat;
  } else if (reply == "unknown") {
    elapsed();
    result.status = CheckStatus::Unknown;
    ++stats_.timeouts;
  } else {
    elapsed();
    throw SolverError("unexpected reply to check-sat: " + reply);
  }
  for (const auto& name : retired) assert_persistent(negate(var(name, Sort::Bool)));
  return result;
}

}  // namespace covgen
