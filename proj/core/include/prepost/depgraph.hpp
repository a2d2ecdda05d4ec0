#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prepost/replay.hpp"
#include "prepost/trace.hpp"

namespace prepost {

struct DepNode {
  enum class Kind { Send, Recv, Close, SelectDefault };

  Loc loc = 0;
  Tid tid = 0;
  Kind kind = Kind::Send;
  std::string channel;  // empty for SelectDefault
  bool committed = true;
  std::size_t thread = 0;  // index into TraceSet::threads
  std::size_t slot = 0;    // pre index within the thread's trace
};

struct DepEdge {
  // SendBeforeClose: a thread's synchronous send on x committed, so it
  // precedes the close of x (sending on a closed channel crashes).
  enum class Kind { ProgramOrder, Sync, CloseBefore, SendBeforeClose };

  std::size_t from = 0;  // node indices
  std::size_t to = 0;
  Kind kind = Kind::ProgramOrder;

  friend bool operator==(const DepEdge&, const DepEdge&) = default;
};

/// Nodes sorted by location. A committed pre contributes one committed node
/// for the chosen operation and an uncommitted node for every other
/// communication it offered; a dangling pre contributes uncommitted nodes
/// only. Sync pairing follows the first residual replay linearization.
///
/// Ordering works on units: the two sides of a sync form one unit, every
/// other node is a unit of its own. ProgramOrder and CloseBefore edges
/// between units generate the unit order.
struct DepGraph {
  std::vector<DepNode> nodes;
  std::vector<DepEdge> edges;  // sorted by (from loc, to loc, kind)
  std::vector<std::vector<std::size_t>> out;  // edge indices per node
  std::vector<SyncCandidate> steps;  // the linearization used for pairing
  bool complete = true;              // the linearization consumed every post

  std::vector<std::size_t> unit_of;             // per node; units [0, steps.size()) are the steps
  std::vector<std::vector<bool>> unit_reach;    // strict unit order
  std::vector<std::vector<bool>> causal_reach;  // unit order without SendBeforeClose edges
  std::vector<std::size_t> slot_pred;           // per node: committed node of the previous slot, or npos
  std::vector<std::size_t> slot_committed;      // per node: committed node of its own slot, or npos

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t index(Loc loc) const;  // throws Error on an unknown location
  const DepNode& node(Loc loc) const { return nodes[index(loc)]; }
};

/// Throws InconsistentTrace on duplicate locations or on a receive whose
/// named sender never sent on that channel.
DepGraph build_graph(const TraceSet& ts, const ReplayLimits& limits = {});

/// Strict order: the unit of a precedes the unit of b, or a and b are the
/// send and receive of one sync.
bool happens_before(const DepGraph& g, Loc a, Loc b);
bool concurrent(const DepGraph& g, Loc a, Loc b);

/// True iff a and b can be offered at the same time: neither one's pre must
/// have committed before the other's pre is reached.
bool co_enabled(const DepGraph& g, Loc a, Loc b);

/// happens_before over all pairs of committed nodes that took part in the
/// linearization.
std::set<std::pair<Loc, Loc>> hb_relation(const DepGraph& g);

/// Same-channel send/receive node pairs in different threads that are
/// co-enabled and not joined by a Sync edge, sorted.
std::vector<std::pair<Loc, Loc>> alt_communications_graph(const DepGraph& g);

/// (send, close) pairs where the send, committed or not, is not causally
/// ordered before the close of its channel: only the absence of a crash
/// keeps it from following the close.
std::vector<std::pair<Loc, Loc>> close_hazards(const DepGraph& g);

struct GraphSchedules {
  std::vector<RunTimeTrace> schedules;  // sorted, distinct
  bool truncated = false;
};

/// Every order of the linearization's steps compatible with the graph,
/// produced by repeatedly picking a step whose successors are all placed.
GraphSchedules schedules_by_backward_traversal(const DepGraph& g, std::size_t cap = kDefaultMaxSchedules);

/// Checks the per-kind out-degree bounds: at most one Sync edge and at most
/// one ProgramOrder edge to a committed node. Acyclicity is checked by
/// build_graph. Throws InconsistentTrace.
void check_invariants(const DepGraph& g);

std::string label(const DepNode& n);
/// Deterministic DOT text: nodes in location order, uncommitted dashed,
/// Sync edges bold, CloseBefore edges dotted, SendBeforeClose edges gray.
std::string to_dot(const DepGraph& g);

}  // namespace prepost
