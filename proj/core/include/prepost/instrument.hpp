#pragma once

#include <cstdint>
#include <string>

#include "prepost/interpreter.hpp"
#include "prepost/program.hpp"
#include "prepost/trace.hpp"

namespace prepost {

/// Instrumented program. Communication sites keep their original locations,
/// so logged events refer to the source program directly.
struct InstrumentedProgram {
  Program program;
};

/// Name of the fresh variable a tagged receive at `loc` binds before the
/// sender id and the value are projected out of it.
std::string received_var(Loc loc);

/// Injects pre/post logging and sender-id piggybacking. Throws
/// ReservedNameError if `p` mentions a `$`-prefixed name.
InstrumentedProgram instrument(const Program& p);

/// Removes everything `instrument` added.
Program erase(const InstrumentedProgram& ip);

/// True for commands that exist only to maintain the logs.
bool is_instrumentation(const Command& c);

/// Decodes the per-thread logs of a run of an instrumented program. Threads
/// that never logged get an empty trace. Raw buffered-send ids are renumbered
/// to thread_count + 1, thread_count + 2, ... in allocation order. Throws
/// DecodeError naming the thread and index of a malformed entry.
TraceSet collect_local_traces(const RunResult& result);

/// The run-time trace with the same virtual id renumbering.
RunTimeTrace actual_trace(const RunResult& result);

struct Recording {
  RunResult result;
  TraceSet raw;     // one trace per real thread
  TraceSet traces;  // buffered sends moved to virtual traces
  RunTimeTrace actual;
};

/// Instruments, runs and collects in one go.
Recording record(const Program& p, std::uint64_t seed, std::size_t max_steps = kDefaultMaxSteps);
Recording record_with(const Program& p, const Scheduler& scheduler, std::size_t max_steps = kDefaultMaxSteps);

}  // namespace prepost
