#include <benchmark/benchmark.h>

#include <cstdlib>

#include "covgen/cover.hpp"
#include "covgen/generator.hpp"
#include "covgen/parser.hpp"
#include "covgen/sema.hpp"
#include "covgen/transform.hpp"
#include "covgen/vcgen.hpp"

namespace {

using namespace covgen;

std::string program_text(unsigned diamonds) {
  GenConfig g;
  g.diamonds = diamonds;
  g.seed = 42;
  return gen_program(g);
}

SolverOptions solver_options() {
  SolverOptions o;
  const char* env = std::getenv("COVGEN_SOLVER");
  o.command = env && *env ? env : COVGEN_SOLVER_DEFAULT;
  return o;
}

void BM_Parse(benchmark::State& state) {
  const std::string text = program_text(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_semantics(parse_program(text)));
}
BENCHMARK(BM_Parse)->DenseRange(2, 9, 7);

void BM_Lower(benchmark::State& state) {
  const Program p = check_semantics(parse_program(program_text(static_cast<unsigned>(state.range(0)))));
  for (auto _ : state) {
    Lowering low = lower(p, "main", UnwindConfig{});
    benchmark::DoNotOptimize(build_reachability_vc(low.passive));
  }
}
BENCHMARK(BM_Lower)->DenseRange(2, 9, 7);

void BM_Cover(benchmark::State& state, Algorithm algo) {
  const Program p = check_semantics(parse_program(program_text(static_cast<unsigned>(state.range(0)))));
  Lowering low = lower(p, "main", UnwindConfig{});
  const VcBundle vc = build_reachability_vc(low.passive);
  std::size_t queries = 0;
  for (auto _ : state) {
    try {
      queries = run_cover(algo, vc, solver_options()).stats.queries;
    } catch (const std::exception& e) {
      state.SkipWithError(e.what());
      return;
    }
  }
  state.counters["queries"] = static_cast<double>(queries);
}
BENCHMARK_CAPTURE(BM_Cover, stmt, Algorithm::Stmt)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Cover, fm, Algorithm::Fm)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Cover, path, Algorithm::Path)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
