#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prepost/interpreter.hpp"
#include "prepost/trace.hpp"

namespace prepost {

inline constexpr std::size_t kDefaultMaxSchedules = 1024;
inline constexpr std::size_t kDefaultMaxStates = 65536;

struct ReplayLimits {
  std::size_t max_schedules = kDefaultMaxSchedules;
  std::size_t max_states = kDefaultMaxStates;
};

/// Remaining suffix of every trace, as an index into TraceSet::threads order.
struct ReplayState {
  std::vector<std::size_t> pos;
  std::map<std::string, Tid, std::less<>> closed;  // channel -> closing thread
  RunTimeTrace emitted;

  /// Memo identity: positions and closed channels, not the emitted prefix.
  std::string key() const;
};

struct SyncCandidate {
  enum class Kind { Sync, RcvClosed, Default, Close };

  Kind kind = Kind::Sync;
  std::size_t sender = 0;    // thread index; the acting thread for Default/Close
  std::size_t receiver = 0;  // thread index; Sync and RcvClosed
  Tid sender_tid = 0;
  Tid receiver_tid = 0;
  std::string channel;
  Loc sender_loc = 0;
  Loc receiver_loc = 0;

  friend bool operator==(const SyncCandidate&, const SyncCandidate&) = default;
};

struct AlternativeMatch {
  std::string channel;
  Loc send_loc = 0;
  Loc recv_loc = 0;
  Tid send_tid = 0;
  Tid recv_tid = 0;
  bool send_committed = false;  // the sender's pre is followed by a post
  bool recv_committed = false;

  friend bool operator==(const AlternativeMatch&, const AlternativeMatch&) = default;
};

ReplayState initial_replay_state(const TraceSet& ts);

/// Every rule instance enabled at the heads of `rs`, in thread order.
std::vector<SyncCandidate> replay_choices(const TraceSet& ts, const ReplayState& rs);

/// Consumes the heads named by `c` and appends its events. `c` must be one
/// of replay_choices(ts, rs).
ReplayState replay_apply(const TraceSet& ts, ReplayState rs, const SyncCandidate& c);
/// Events emitted by a candidate, as the interpreter would emit them.
RunTimeTrace candidate_events(const SyncCandidate& c);

/// Every real trace is empty or a single dangling pre. Virtual traces may be
/// left whole: a buffered message nobody received is never replayed.
bool is_residual(const TraceSet& ts, const ReplayState& rs);
/// Residual and the main thread's trace is fully consumed.
bool is_accepting(const TraceSet& ts, const ReplayState& rs);

struct ScheduleSet {
  std::vector<RunTimeTrace> schedules;  // sorted, distinct
  bool truncated = false;
  std::size_t states = 0;
};

/// Emitted traces of every replay path ending in a residual state, which
/// includes runs that deadlocked with dangling pres.
ScheduleSet enumerate_schedules(const TraceSet& ts, const ReplayLimits& limits = {});

/// The replay steps that emit exactly `t`, if any. Candidates emit distinct
/// events, so the path is unique.
std::optional<std::vector<SyncCandidate>> steps_for(const TraceSet& ts, const RunTimeTrace& t);

/// True iff replay can emit exactly `t` and end in a residual state.
bool contains_actual(const TraceSet& ts, const RunTimeTrace& t);

/// Send/receive options at the heads of `rs` that could have paired but did
/// not, sorted by (send_loc, recv_loc).
std::vector<AlternativeMatch> find_alternative_matches(const TraceSet& ts, const ReplayState& rs);
std::vector<AlternativeMatch> find_alternative_matches(const TraceSet& ts);

struct AlternativeCommunications {
  std::vector<AlternativeMatch> matches;  // one per location pair, sorted
  bool truncated = false;
  std::size_t states = 0;
};

/// Alternative matches over every replay-reachable state.
AlternativeCommunications find_alternative_communications(const TraceSet& ts, const ReplayLimits& limits = {});

struct PendingPre {
  Tid tid = 0;
  PreEvent pre;

  friend bool operator==(const PendingPre&, const PendingPre&) = default;
};

struct ResidualReport {
  enum class Kind {
    CompletedResidual,  // main consumed, others empty or dangling
    StuckWithPending,   // residual but main blocked on a dangling pre
    NotResidual,        // no rule applies yet posts remain
  };

  Kind kind = Kind::CompletedResidual;
  std::vector<PendingPre> pending;  // real threads only, ascending tid
};

ResidualReport residual_report(const TraceSet& ts, const ReplayState& rs);
std::string to_string(ResidualReport::Kind k);

/// One replay path consuming every post, found depth-first in thread order.
/// When no residual state is reachable the longest path found is returned.
struct Linearization {
  std::vector<SyncCandidate> steps;
  ReplayState final_state;
  bool complete = false;
  bool truncated = false;
};

Linearization find_linearization(const TraceSet& ts, const ReplayLimits& limits = {});

/// Pairs (a, b) of committed locations such that a is emitted before b in
/// every replay path ending in a residual state that keeps the sync
/// pairing of find_linearization. Computed on the full reachable state
/// graph; truncated if no residual linearization was found.
struct OrderRelation {
  std::set<std::pair<Loc, Loc>> before;
  std::set<Loc> events;
  bool truncated = false;
  std::size_t states = 0;
};

OrderRelation exhaustive_order(const TraceSet& ts, const ReplayLimits& limits = {});

}  // namespace prepost
