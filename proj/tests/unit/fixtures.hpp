#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "prepost/corpus.hpp"
#include "prepost/instrument.hpp"
#include "prepost/parser.hpp"
#include "prepost/trace_io.hpp"

namespace prepost::fixtures {

/// The four local traces of the fig1 example, located by its labels 1..6
/// rather than by source order.
inline const char* const kFig1Traces =
    "T1: pre(x?@1); post(2#x?@1); pre(x?@2); post(3#x?@2)\n"
    "T2: pre(x!@3); post(x!@3)\n"
    "T3: pre(y!@4); post(y!@4); pre(x!@5); post(x!@5)\n"
    "T4: pre(y?@6); post(3#y?@6)\n";

inline TraceSet fig1() { return parse_trace_set(kFig1Traces); }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string golden(const std::string& name) { return slurp(std::string(PREPOST_GOLDEN_DIR) + "/" + name); }

inline Program corpus_parsed(std::string_view name) { return parse_program(corpus_program(name).source); }

inline Recording corpus_run(std::string_view name, std::uint64_t seed) { return record(corpus_parsed(name), seed); }

/// First seed in [0, limit) whose run ends with `status`.
inline std::uint64_t find_seed(std::string_view name, RunStatus status, std::uint64_t limit = 1000) {
  const Program p = corpus_parsed(name);
  for (std::uint64_t s = 0; s < limit; ++s)
    if (run(instrument(p).program, s).status == status) return s;
  throw Error("no seed with the requested status");
}

}  // namespace prepost::fixtures
