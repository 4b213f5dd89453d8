#include "covgen/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <thread>

#include "covgen/parser.hpp"
#include "covgen/sema.hpp"
#include "covgen/transform.hpp"
#include "covgen/vcgen.hpp"

namespace covgen {

std::uint64_t program_seed(std::uint64_t base, unsigned diamonds, unsigned index) {
  return base + 1000ULL * diamonds + index;
}

std::vector<BenchRow> bench_program(const std::string& id, const GenConfig& gen,
                                    const std::vector<Algorithm>& algos,
                                    const SolverOptions& solver, unsigned unwind_k,
                                    std::vector<CoverReport>* reports) {
  const Program program = check_semantics(parse_program(gen_program(gen)));
  UnwindConfig u;
  u.k = unwind_k;
  Lowering low = lower(program, "main", u);
  const VcBundle vc = build_reachability_vc(low.passive);
  std::vector<BenchRow> rows;
  for (Algorithm a : algos) {
    CoverReport r = run_cover(a, vc, solver);
    BenchRow row;
    row.program_id = id;
    row.diamonds = gen.diamonds;
    row.seed = gen.seed;
    row.algo = a;
    row.queries = r.stats.queries;
    row.sat = r.stats.sat;
    row.unsat = r.stats.unsat;
    row.timeouts = r.stats.timeouts;
    row.time_ms = r.stats.time_ms;
    row.covered = r.covered.size();
    row.uncovered = r.uncovered.size();
    row.blocks = vc.blocks.size() - 1;  // $exit is never queried
    row.covered_set = r.covered;
    row.flagged = r.incomplete;
    rows.push_back(std::move(row));
    if (reports) reports->push_back(std::move(r));
  }
  return rows;
}

BenchResult run_bench(const BenchConfig& config) {
  struct Job {
    std::string id;
    GenConfig gen;
  };
  std::vector<Job> jobs;
  for (unsigned d : config.diamonds) {
    for (unsigned i = 0; i < config.per; ++i) {
      GenConfig g = config.gen;
      g.diamonds = d;
      g.seed = program_seed(config.seed, d, i);
      jobs.push_back({"d" + std::to_string(d) + "_" + std::to_string(i), g});
    }
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<BenchRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= jobs.size()) return;
      try {
        results[i] = bench_program(jobs[i].id, jobs[i].gen, config.algos, config.solver,
                                   config.unwind_k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const unsigned n = std::max(1u, config.threads);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  BenchResult out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& rows = results[i];
    bool agree = true;
    for (const auto& r : rows) {
      if (!r.flagged && !rows.front().flagged && r.covered_set != rows.front().covered_set) agree = false;
    }
    if (!agree) out.disagreements.push_back(jobs[i].id);
    for (const auto& r : rows) {
      out.total_queries[r.algo] += r.queries;
      out.rows.push_back(r);
    }
  }
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<BenchAggregate> BenchResult::aggregate() const {
  std::map<std::pair<unsigned, Algorithm>, BenchAggregate> acc;
  for (const auto& r : rows) {
    if (r.flagged) continue;
    auto& a = acc[{r.diamonds, r.algo}];
    a.diamonds = r.diamonds;
    a.algo = r.algo;
    ++a.programs;
    a.mean_queries += static_cast<double>(r.queries);
    a.mean_time_ms += r.time_ms;
  }
  std::vector<BenchAggregate> out;
  for (auto& [key, a] : acc) {
    a.mean_queries /= static_cast<double>(a.programs);
    a.mean_time_ms /= static_cast<double>(a.programs);
    out.push_back(a);
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "program_id,diamonds,seed,algo,queries,sat,unsat,timeouts,time_ms,covered,uncovered\n";
  for (const auto& r : rows) {
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.3f", r.time_ms);
    os << r.program_id << ',' << r.diamonds << ',' << r.seed << ',' << to_string(r.algo) << ','
       << r.queries << ',' << r.sat << ',' << r.unsat << ',' << r.timeouts << ',' << ms << ','
       << r.covered << ',' << r.uncovered << '\n';
  }
}

}  // namespace covgen
