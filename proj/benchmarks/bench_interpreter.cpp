#include <benchmark/benchmark.h>

#include "prepost/corpus.hpp"
#include "prepost/instrument.hpp"
#include "prepost/interpreter.hpp"
#include "prepost/parser.hpp"

namespace {

using namespace prepost;

// Plain runs against instrumented runs of the same program and seed; the
// ratio is the interpreter-level cost of pre/post logging.
void BM_RunCollector(benchmark::State& state) {
  const Program p = parse_program(collector_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(run(p, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunCollector)->Arg(10)->Arg(100)->Arg(1000);

void BM_RecordCollector(benchmark::State& state) {
  const Program p = parse_program(collector_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(record(p, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RecordCollector)->Arg(10)->Arg(100)->Arg(1000);

void BM_RunAddPipe(benchmark::State& state) {
  const Program p = parse_program(add_pipe_source(static_cast<std::size_t>(state.range(0)), 10));
  for (auto _ : state) benchmark::DoNotOptimize(run(p, 0));
}
BENCHMARK(BM_RunAddPipe)->Arg(5)->Arg(20);

void BM_RecordAddPipe(benchmark::State& state) {
  const Program p = parse_program(add_pipe_source(static_cast<std::size_t>(state.range(0)), 10));
  for (auto _ : state) benchmark::DoNotOptimize(record(p, 0));
}
BENCHMARK(BM_RecordAddPipe)->Arg(5)->Arg(20);

void BM_RunPrimesieve(benchmark::State& state) {
  const Program p = parse_program(primesieve_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(run(p, 0));
}
BENCHMARK(BM_RunPrimesieve)->Arg(5)->Arg(10);

void BM_RecordPrimesieve(benchmark::State& state) {
  const Program p = parse_program(primesieve_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(record(p, 0));
}
BENCHMARK(BM_RecordPrimesieve)->Arg(5)->Arg(10);

}  // namespace
