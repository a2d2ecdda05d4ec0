#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "prepost/interpreter.hpp"
#include "prepost/replay.hpp"
#include "prepost/trace.hpp"

namespace prepost {

using VectorClock = std::vector<std::uint64_t>;

/// Throws Error when `i` is out of range.
VectorClock vc_inc(VectorClock cs, std::size_t i);
/// Pointwise maximum. Throws Error on a length mismatch.
VectorClock vc_max(const VectorClock& a, const VectorClock& b);
/// Strict order: a <= b everywhere and a < b somewhere.
bool vc_less(const VectorClock& a, const VectorClock& b);

struct ClockedEvent {
  TraceEvent event;
  VectorClock clock;
  std::uint64_t analysis = 0;  // identifies the assign_clocks call
  std::uint64_t pair = 0;      // shared by the two sides of one sync, 0 otherwise
};

/// Clock index k belongs to TraceSet::threads[k]; virtual traces sort after
/// real ones because their ids do.
struct ClockAssignment {
  std::vector<Tid> index_tids;
  std::vector<ClockedEvent> events;  // in linearization order
  bool complete = true;
};

/// Replays one linearization and threads clocks through it. A sync gives
/// both sides max(inc(sender), inc(receiver)); a default increments its
/// own thread; a close increments its thread and joins every earlier
/// synchronous send on the channel, since such sends cannot follow it; a
/// receive on a closed channel joins the closer's clock at the close.
/// Events never replayed get no clock.
ClockAssignment assign_clocks(const TraceSet& ts, const ReplayLimits& limits = {});
ClockAssignment assign_clocks(const TraceSet& ts, const std::vector<SyncCandidate>& steps);

/// Clock order, with sync partners ordered send first. Throws Error when
/// the events come from different assignments or are the same event.
bool hb_by_clock(const ClockedEvent& a, const ClockedEvent& b);

/// hb_by_clock over all pairs, by location.
std::set<std::pair<Loc, Loc>> clock_relation(const ClockAssignment& ca);

}  // namespace prepost
