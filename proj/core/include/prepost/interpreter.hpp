#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "prepost/errors.hpp"
#include "prepost/program.hpp"

namespace prepost {

/// Raw ids handed to buffered sends. Local-trace collection renumbers them
/// to follow the real thread ids.
inline constexpr Tid kVirtualTidBase = 1'000'000'000;
inline constexpr std::size_t kDefaultMaxSteps = 100'000;

/// Send on a closed channel, or closing a closed channel.
class ChannelCrash : public Error {
 public:
  using Error::Error;
};

struct TraceEvent {
  enum class Kind { Send, Recv, Default, Close };

  Kind kind = Kind::Send;
  Tid tid = 0;
  Tid from = 0;  // Recv only; kClosedSenderTid for a receive on a closed channel
  std::string channel;
  Loc loc = 0;
  Loc partner_loc = 0;  // location of the matching send/receive, 0 if none

  /// Equality on the observable event (thread, partner, channel), ignoring locations.
  bool same_action(const TraceEvent& o) const {
    return kind == o.kind && tid == o.tid && from == o.from && channel == o.channel;
  }

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
  friend auto operator<=>(const TraceEvent&, const TraceEvent&) = default;
};

using RunTimeTrace = std::vector<TraceEvent>;

/// `2!x`, `1?<2,x>`, `3:sel`, `1:close x`.
std::string to_string(const TraceEvent& e);
std::string to_string(const RunTimeTrace& t);
bool same_actions(const RunTimeTrace& a, const RunTimeTrace& b);

struct ThreadState {
  Tid tid = 0;
  std::vector<const Command*> stack;  // back() runs next
  bool started = true;  // a spawned goroutine offers nothing until its Start step
};

struct Config {
  std::shared_ptr<const Program> program;  // owns every Command the stacks point into
  State state;
  std::vector<ThreadState> threads;  // ascending tid
  Tid next_tid = 2;
  Tid next_virtual = kVirtualTidBase;
};

struct StepChoice {
  enum class Kind { Start, Terminate, Local, Sync, BufferedSend, BufferedRecv, RecvClosed, Default, CrashSend };

  Kind kind = Kind::Local;
  std::size_t thread = 0;  // index into Config::threads
  std::size_t branch = 0;
  std::size_t partner = 0;  // Sync: receiving thread index
  std::size_t partner_branch = 0;

  friend bool operator==(const StepChoice&, const StepChoice&) = default;
};

/// Scheduler-independent description of a step, comparable across an
/// instrumented program and its original.
struct StepSignature {
  StepChoice::Kind kind = StepChoice::Kind::Local;
  Tid tid = 0;
  Tid partner = 0;
  Loc loc = 0;
  Loc partner_loc = 0;
  bool instrumentation = false;  // TraceInit/TraceAppend/TraceSendPost

  friend bool operator==(const StepSignature&, const StepSignature&) = default;
};

enum class RunStatus { Completed, Deadlock, StepLimit, Crashed };
std::string to_string(RunStatus s);

struct RunResult {
  State final_state;
  RunTimeTrace trace;
  RunStatus status = RunStatus::Completed;
  std::uint64_t seed = 0;
  std::string diagnostic;
  Tid thread_count = 1;         // real threads spawned, main included
  std::vector<Tid> virtual_ids; // raw virtual ids in allocation order
  std::size_t steps = 0;
  std::vector<StepSignature> schedule;
};

using Scheduler = std::function<std::size_t(const Config&, const std::vector<StepChoice>&)>;

Config initial_config(std::shared_ptr<const Program> program);

/// Every applicable rule instance. Throws EvalError when a select names an
/// unbound channel.
std::vector<StepChoice> enabled_steps(const Config& cfg);

/// In-place step; returns the emitted events. Throws ChannelCrash / EvalError.
RunTimeTrace apply_step(Config& cfg, const StepChoice& choice);

/// Functional form of apply_step.
std::pair<Config, RunTimeTrace> step(const Config& cfg, const StepChoice& choice);

StepSignature signature(const Config& cfg, const StepChoice& choice);

/// Identity of a configuration up to plain variable values: thread
/// positions, channel contents and id counters.
std::string config_key(const Config& cfg);

bool main_finished(const Config& cfg);

/// Runs until the main thread finishes, no step is enabled, or the step
/// budget is spent. Uniform seeded choice among enabled steps.
RunResult run(const Program& prog, std::uint64_t seed, std::size_t max_steps = kDefaultMaxSteps);
RunResult run_with(const Program& prog, const Scheduler& scheduler, std::size_t max_steps = kDefaultMaxSteps);

}  // namespace prepost
