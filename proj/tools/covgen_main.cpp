// covgen: test-suite generation and bounded infeasible-code detection.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "covgen/analysis.hpp"
#include "covgen/bench.hpp"
#include "covgen/error.hpp"
#include "covgen/exec.hpp"
#include "covgen/generator.hpp"
#include "covgen/parser.hpp"
#include "covgen/report.hpp"
#include "covgen/sema.hpp"
#include "covgen/vcgen.hpp"

namespace {

using namespace covgen;

std::string default_solver() {
  const char* env = std::getenv("COVGEN_SOLVER");
  return env && *env ? env : "z3 -in smt.phase_selection=5";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path);
  out << text;
}

Program load(const std::string& path) { return check_semantics(parse_program(read_file(path))); }

// "2..9", "4" or "2,3,5".
std::vector<unsigned> parse_range(const std::string& s) {
  std::vector<unsigned> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    unsigned lo = static_cast<unsigned>(std::stoul(s.substr(0, dots)));
    unsigned hi = static_cast<unsigned>(std::stoul(s.substr(dots + 2)));
    if (lo > hi) throw std::invalid_argument("empty range " + s);
    for (unsigned d = lo; d <= hi; ++d) out.push_back(d);
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<unsigned>(std::stoul(item)));
  return out;
}

std::vector<Algorithm> parse_algos(const std::string& s) {
  std::vector<Algorithm> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_algorithm(item));
  return out;
}

int run_parse(const std::string& file, bool print) {
  Program p = load(file);
  if (print) {
    std::cout << print_program(p);
  } else {
    std::size_t blocks = 0;
    for (const auto& proc : p.procedures) blocks += proc.blocks.size();
    std::cout << "ok: " << p.procedures.size() << " procedure(s), " << blocks << " block(s)\n";
  }
  return 0;
}

int run_analyze(AnalysisConfig cfg) {
  Program p = load(cfg.input);
  AnalysisResult r = analyze_program(p, cfg);
  if (cfg.dump_passive) std::cerr << print_procedure(r.lowering.passive.cfg.to_procedure());
  if (cfg.dump_vc) std::cerr << vc_to_smtlib(r.vc, cfg.solver.logic);
  write_output(cfg.output, serialize_report(make_report(r, cfg)));
  for (std::size_t i = 0; i < r.replays.size(); ++i) {
    if (!r.replays[i].feasible()) {
      std::cerr << "covgen: test case " << i << " failed replay: " << r.replays[i].detail << "\n";
    }
  }
  if (r.cover.incomplete) std::cerr << "covgen: solver timed out; report is incomplete\n";
  return r.exit_code();
}

int run_oracle(const std::string& file, const std::string& entry, unsigned k, unsigned depth,
               const SolverOptions& solver) {
  Program p = load(file);
  AnalysisConfig cfg;
  cfg.entry = entry;
  cfg.k = k;
  cfg.max_inline_depth = depth;
  Lowering low = lower_for(p, cfg);
  SolverSession s(logic_for(solver, is_nonlinear(low.unwound)));
  OracleResult r = enumerate_paths_oracle(low.unwound, s);
  std::cout << oracle_to_json(r);
  return r.incomplete ? 3 : 0;
}

int run_bench_cmd(BenchConfig cfg, const std::string& csv) {
  BenchResult r = run_bench(cfg);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw Error("io", "cannot write " + csv);
    write_csv(out, r.rows);
  } else {
    write_csv(std::cout, r.rows);
  }
  std::cerr << "diamonds  algo  programs  mean_queries  mean_time_ms\n";
  for (const auto& a : r.aggregate()) {
    std::cerr << std::setw(8) << a.diamonds << "  " << std::setw(4) << to_string(a.algo) << "  "
              << std::setw(8) << a.programs << "  " << std::setw(12) << std::fixed
              << std::setprecision(1) << a.mean_queries << "  " << std::setw(12) << a.mean_time_ms
              << "\n";
  }
  for (const auto& [algo, q] : r.total_queries) {
    std::cerr << "total " << to_string(algo) << " queries: " << q << "\n";
  }
  for (const auto& id : r.disagreements) std::cerr << "covgen: covered sets disagree on " << id << "\n";
  return r.disagreements.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test-suite generation and bounded infeasible-code detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", covgen::kVersion);

  std::string file;
  bool print = false;
  auto* parse = app.add_subcommand("parse", "Parse and check a program");
  parse->add_option("file", file, "Source file")->required();
  parse->add_flag("--print", print, "Print the normalised program");

  AnalysisConfig acfg;
  acfg.solver.command = default_solver();
  std::string algo = "stmt";
  auto* analyze = app.add_subcommand("analyze", "Generate tests and report infeasible blocks");
  analyze->add_option("file", acfg.input, "Source file")->required();
  analyze->add_option("--algo", algo, "path | stmt | fm")->check(CLI::IsMember({"path", "stmt", "fm"}));
  analyze->add_option("--k", acfg.k, "Loop unwindings")->check(CLI::NonNegativeNumber);
  analyze->add_flag("--summaries", acfg.summaries, "Use procedure summaries instead of inlining");
  analyze->add_option("--cap", acfg.cap, "Summary entries per procedure")->check(CLI::PositiveNumber);
  analyze->add_option("--rounds", acfg.rounds, "Summary refinement rounds");
  analyze->add_option("--solver", acfg.solver.command, "Solver command line");
  analyze->add_option("--logic", acfg.solver.logic, "SMT-LIB logic");
  analyze->add_option("--timeout", acfg.solver.timeout_s, "Seconds per query")->check(CLI::PositiveNumber);
  analyze->add_option("--output,-o", acfg.output, "Report path (default stdout)");
  analyze->add_flag("--dump-passive", acfg.dump_passive, "Print the passive program to stderr");
  analyze->add_flag("--dump-vc", acfg.dump_vc, "Print the verification condition to stderr");
  analyze->add_option("--entry", acfg.entry, "Procedure to analyse");
  analyze->add_option("--max-inline-depth", acfg.max_inline_depth, "Copies of a procedure per inline chain");
  analyze->add_flag("--fm-reuse", acfg.fm_reuse, "Let fm skip blocks an earlier model reached");

  std::string ofile, oentry = "main";
  unsigned ok = 1, odepth = 2;
  SolverOptions osolver;
  osolver.command = default_solver();
  auto* oracle = app.add_subcommand("oracle", "Classify every complete path (loop-free after unwinding)");
  oracle->add_option("file", ofile, "Source file")->required();
  oracle->add_option("--entry", oentry, "Procedure to analyse");
  oracle->add_option("--k", ok, "Loop unwindings");
  oracle->add_option("--max-inline-depth", odepth, "Copies of a procedure per inline chain");
  oracle->add_option("--solver", osolver.command, "Solver command line");
  oracle->add_option("--timeout", osolver.timeout_s, "Seconds per query")->check(CLI::PositiveNumber);

  GenConfig gcfg;
  unsigned vars = 0;
  std::string gout;
  auto* gen = app.add_subcommand("gen", "Generate a random diamond program");
  gen->add_option("--diamonds", gcfg.diamonds, "Number of diamonds")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gcfg.seed, "PRNG seed");
  gen->add_option("--depth", gcfg.nesting_depth, "Nesting depth of each diamond");
  gen->add_option("--stmts", gcfg.stmts_per_block, "Statements per block")->check(CLI::PositiveNumber);
  gen->add_option("--vars", vars, "Number of variables (default: drawn from 10..20)");
  gen->add_option("--extra-assume", gcfg.extra_assume_percent, "Percent of branches with an extra assume");
  gen->add_option("--const-assign", gcfg.const_assign_percent, "Percent of constant assignments");
  gen->add_option("--loops", gcfg.loops, "Diamonds that get a back-edge");
  gen->add_option("--const-min", gcfg.const_min);
  gen->add_option("--const-max", gcfg.const_max);
  gen->add_option("--coef-min", gcfg.coef_min);
  gen->add_option("--coef-max", gcfg.coef_max);
  gen->add_option("--output,-o", gout, "Output path (default stdout)");

  BenchConfig bcfg;
  bcfg.solver.command = default_solver();
  std::string brange = "2..9", balgos = "path,stmt,fm", csv;
  auto* bench = app.add_subcommand("bench", "Compare the algorithms on generated programs");
  bench->add_option("--diamonds", brange, "Range such as 2..9 or a list 2,4");
  bench->add_option("--per", bcfg.per, "Programs per diamond count");
  bench->add_option("--algos", balgos, "Comma-separated algorithms");
  bench->add_option("--seed", bcfg.seed, "Base seed");
  bench->add_option("--csv", csv, "CSV output path (default stdout)");
  bench->add_option("--threads", bcfg.threads, "Programs analysed in parallel");
  bench->add_option("--solver", bcfg.solver.command, "Solver command line");
  bench->add_option("--timeout", bcfg.solver.timeout_s, "Seconds per query")->check(CLI::PositiveNumber);
  bench->add_option("--k", bcfg.unwind_k, "Loop unwindings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*parse) return run_parse(file, print);
    if (*analyze) {
      acfg.algorithm = parse_algorithm(algo);
      return run_analyze(acfg);
    }
    if (*oracle) return run_oracle(ofile, oentry, ok, odepth, osolver);
    if (*gen) {
      if (vars) gcfg.num_vars = vars;
      write_output(gout, gen_program(gcfg));
      return 0;
    }
    if (*bench) {
      bcfg.diamonds = parse_range(brange);
      bcfg.algos = parse_algos(balgos);
      return run_bench_cmd(bcfg, csv);
    }
  } catch (const Error& e) {
    std::cerr << "covgen: " << e.stage() << " error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "covgen: error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
