#include <benchmark/benchmark.h>

#include "prepost/corpus.hpp"
#include "prepost/depgraph.hpp"
#include "prepost/instrument.hpp"
#include "prepost/parser.hpp"
#include "prepost/replay.hpp"
#include "prepost/report.hpp"
#include "prepost/vclock.hpp"

namespace {

using namespace prepost;

TraceSet traces_of(const std::string& source) { return record(parse_program(source), 0).traces; }

void BM_LinearizeCollector(benchmark::State& state) {
  const TraceSet ts = traces_of(collector_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(find_linearization(ts));
}
BENCHMARK(BM_LinearizeCollector)->Arg(10)->Arg(100)->Arg(1000);

void BM_GraphCollector(benchmark::State& state) {
  const TraceSet ts = traces_of(collector_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(ts));
}
BENCHMARK(BM_GraphCollector)->Arg(10)->Arg(100);

void BM_ClocksCollector(benchmark::State& state) {
  const TraceSet ts = traces_of(collector_source(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assign_clocks(ts));
}
BENCHMARK(BM_ClocksCollector)->Arg(10)->Arg(100)->Arg(1000);

void BM_SchedulesNewsreader(benchmark::State& state) {
  const TraceSet ts = traces_of(corpus_program("newsreader").source);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_schedules(ts));
}
BENCHMARK(BM_SchedulesNewsreader);

void BM_OrderPrimesieve(benchmark::State& state) {
  const TraceSet ts = traces_of(corpus_program("primesieve").source);
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_order(ts));
}
BENCHMARK(BM_OrderPrimesieve);

void BM_AnalyzeCorpus(benchmark::State& state) {
  std::vector<TraceSet> all;
  for (const CorpusProgram& c : corpus()) all.push_back(traces_of(c.source));
  for (auto _ : state)
    for (const TraceSet& ts : all) benchmark::DoNotOptimize(analyze(ts));
}
BENCHMARK(BM_AnalyzeCorpus);

}  // namespace
