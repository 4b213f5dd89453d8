#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "covgen/cover.hpp"
#include "covgen/generator.hpp"

namespace covgen {

struct BenchRow {
  std::string program_id;
  unsigned diamonds = 0;
  std::uint64_t seed = 0;
  Algorithm algo = Algorithm::Stmt;
  std::size_t queries = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t timeouts = 0;
  double time_ms = 0;  // solver interaction only
  std::size_t covered = 0;
  std::size_t uncovered = 0;
  std::size_t blocks = 0;  // blocks of the passive program, $exit excluded
  std::set<std::string> covered_set;
  bool flagged = false;  // timed out; skipped by aggregation
};

struct BenchConfig {
  std::vector<unsigned> diamonds{2, 3, 4, 5, 6, 7, 8, 9};
  unsigned per = 10;
  std::vector<Algorithm> algos{Algorithm::Path, Algorithm::Stmt, Algorithm::Fm};
  std::uint64_t seed = 1;
  GenConfig gen;  // diamonds and seed are overwritten per program
  SolverOptions solver;
  unsigned unwind_k = 1;
  unsigned threads = 1;  // programs analysed in parallel
};

struct BenchAggregate {
  unsigned diamonds = 0;
  Algorithm algo = Algorithm::Stmt;
  std::size_t programs = 0;
  double mean_queries = 0;
  double mean_time_ms = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<std::string> disagreements;  // programs whose covered sets differ
  std::map<Algorithm, std::size_t> total_queries;
  double wall_ms = 0;  // end to end

  std::vector<BenchAggregate> aggregate() const;
};

/// Seed of program `index` with `diamonds` diamonds.
std::uint64_t program_seed(std::uint64_t base, unsigned diamonds, unsigned index);

/// Analyses one generated program with each algorithm (one session each).
/// The full reports are appended to `reports` when given.
std::vector<BenchRow> bench_program(const std::string& id, const GenConfig& gen,
                                    const std::vector<Algorithm>& algos,
                                    const SolverOptions& solver, unsigned unwind_k,
                                    std::vector<CoverReport>* reports = nullptr);

BenchResult run_bench(const BenchConfig& config);

/// Columns: program_id,diamonds,seed,algo,queries,sat,unsat,timeouts,time_ms,covered,uncovered
void write_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace covgen
