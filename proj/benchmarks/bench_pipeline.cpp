#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "c2ao/deadlock/deadlock.hpp"
#include "c2ao/explore/explore.hpp"
#include "c2ao/extract/extractor.hpp"
#include "c2ao/frontend/parser.hpp"
#include "c2ao/vcgen/vcgen.hpp"

namespace {

std::string fixture(const char* name) {
  std::ifstream f(std::string(C2AO_FIXTURE_DIR) + "/" + name);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const c2ao::model::Model& fib_model() {
  static const c2ao::model::Model m = c2ao::extract::extract(c2ao::frontend::parse(fixture("one_to_fib.c")));
  return m;
}

void BM_ParseExtract(benchmark::State& state) {
  std::string src = fixture("one_to_fib.c");
  for (auto _ : state) {
    auto m = c2ao::extract::extract(c2ao::frontend::parse(src));
    benchmark::DoNotOptimize(m.classes.size());
  }
}
BENCHMARK(BM_ParseExtract);

void BM_EmitAbs(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(c2ao::model::emit_abs(fib_model()));
}
BENCHMARK(BM_EmitAbs);

// Whole state space of one_to_fib(n); states explored are reported as a counter.
void BM_ExploreFib(benchmark::State& state) {
  c2ao::explore::Explorer ex(fib_model());
  std::size_t states = 0;
  for (auto _ : state) {
    auto r = ex.explore("one_to_fib", {state.range(0)});
    states = r.stats.states;
    benchmark::DoNotOptimize(r.values.size());
  }
  state.counters["states"] = static_cast<double>(states);
  state.counters["states_per_s"] =
      benchmark::Counter(static_cast<double>(states), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ExploreFib)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_CanonicalKey(benchmark::State& state) {
  c2ao::explore::Explorer ex(fib_model());
  auto c = ex.initial("one_to_fib", {4});
  for (int i = 0; i < 6; ++i) {
    auto en = ex.enabled(c);
    if (en.empty()) break;
    ex.macro_step(c, en.back());
  }
  for (auto _ : state) benchmark::DoNotOptimize(ex.canonical_key(c));
}
BENCHMARK(BM_CanonicalKey);

void BM_DeadlockAnalysis(benchmark::State& state) {
  for (auto _ : state) {
    auto c = c2ao::deadlock::classify(fib_model());
    auto j = c2ao::deadlock::justify(fib_model(), c);
    benchmark::DoNotOptimize(j.verdict);
  }
}
BENCHMARK(BM_DeadlockAnalysis);

void BM_GenerateObligations(benchmark::State& state) {
  for (auto _ : state) {
    auto g = c2ao::vc::generate(fib_model());
    std::size_t bytes = 0;
    for (const auto& o : g.obligations) bytes += c2ao::vc::emit_smtlib(fib_model(), o).size();
    benchmark::DoNotOptimize(bytes);
  }
}
BENCHMARK(BM_GenerateObligations);

}  // namespace

BENCHMARK_MAIN();
