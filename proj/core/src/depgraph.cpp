#include "prepost/depgraph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "prepost/errors.hpp"

namespace prepost {

namespace {

DepNode::Kind node_kind(PreOp::Kind k) {
  switch (k) {
    case PreOp::Kind::Send: return DepNode::Kind::Send;
    case PreOp::Kind::Recv: return DepNode::Kind::Recv;
    case PreOp::Kind::Close: return DepNode::Kind::Close;
    case PreOp::Kind::Default: return DepNode::Kind::SelectDefault;
  }
  return DepNode::Kind::Send;
}

/// Transitive closure of the unit edges. Throws InconsistentTrace on a cycle.
std::vector<std::vector<bool>> close_units(const std::vector<std::set<std::size_t>>& succ) {
  const std::size_t n = succ.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::size_t> order;
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root]) continue;
    std::vector<std::pair<std::size_t, std::set<std::size_t>::const_iterator>> stack{{root, succ[root].begin()}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [u, it] = stack.back();
      if (it == succ[u].end()) {
        state[u] = 2;
        order.push_back(u);
        stack.pop_back();
        continue;
      }
      const std::size_t v = *it++;
      if (state[v] == 1) throw InconsistentTrace("dependency graph has a cycle");
      if (state[v] == 0) {
        state[v] = 1;
        stack.push_back({v, succ[v].begin()});
      }
    }
  }
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t u : order) {  // successors first
    for (std::size_t v : succ[u]) {
      reach[u][v] = true;
      for (std::size_t w = 0; w < n; ++w)
        if (reach[v][w]) reach[u][w] = true;
    }
  }
  return reach;
}

std::vector<std::size_t> step_nodes(const DepGraph& g, const SyncCandidate& s) {
  switch (s.kind) {
    case SyncCandidate::Kind::Sync: return {g.index(s.sender_loc), g.index(s.receiver_loc)};
    case SyncCandidate::Kind::RcvClosed: return {g.index(s.receiver_loc)};
    default: return {g.index(s.sender_loc)};
  }
}

}  // namespace

std::size_t DepGraph::index(Loc loc) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), loc, [](const DepNode& n, Loc l) { return n.loc < l; });
  if (it == nodes.end() || it->loc != loc) throw Error("no graph node at location " + std::to_string(loc));
  return static_cast<std::size_t>(it - nodes.begin());
}

DepGraph build_graph(const TraceSet& ts, const ReplayLimits& limits) {
  validate(ts);
  DepGraph g;
  for (std::size_t t = 0; t < ts.threads.size(); ++t) {
    const LocalTrace& lt = ts.threads[t];
    for (std::size_t k = 0; k < lt.events.size(); k += 2) {
      const auto& pre = std::get<PreEvent>(lt.events[k]);
      const PostEvent* post = k + 1 < lt.events.size() ? &std::get<PostEvent>(lt.events[k + 1]) : nullptr;
      if (post && post->kind == PostEvent::Kind::AsyncSend)
        throw InconsistentTrace("thread " + std::to_string(lt.tid) + " still holds a buffered send; normalize first");
      if (post && post->kind == PostEvent::Kind::Recv && post->partner != kClosedSenderTid) {
        const LocalTrace* from = ts.find(post->partner);
        const bool ok = from && std::any_of(from->events.begin(), from->events.end(), [&](const LocalEvent& e) {
                          const auto* p = std::get_if<PostEvent>(&e);
                          return p && p->kind == PostEvent::Kind::Send && p->channel == post->channel;
                        });
        if (!ok)
          throw InconsistentTrace("thread " + std::to_string(lt.tid) + " received on " + post->channel +
                                  " from thread " + std::to_string(post->partner) + ", which never sent on it");
      }
      const PreOp chosen = post ? committed_option(*post) : PreOp{};
      for (const PreOp& op : pre.options) {
        const bool is_chosen = post && op == chosen;
        if (op.kind == PreOp::Kind::Default && !is_chosen) continue;
        g.nodes.push_back({op.loc, lt.tid, node_kind(op.kind), op.channel, is_chosen, t, k});
      }
    }
  }
  std::sort(g.nodes.begin(), g.nodes.end(), [](const DepNode& a, const DepNode& b) { return a.loc < b.loc; });
  for (std::size_t i = 1; i < g.nodes.size(); ++i)
    if (g.nodes[i - 1].loc == g.nodes[i].loc)
      throw InconsistentTrace("location " + std::to_string(g.nodes[i].loc) + " occurs more than once");

  // Nodes per (thread, slot).
  std::vector<std::map<std::size_t, std::vector<std::size_t>>> slots(ts.threads.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) slots[g.nodes[i].thread][g.nodes[i].slot].push_back(i);

  for (std::size_t t = 0; t < slots.size(); ++t) {
    for (auto it = slots[t].begin(); it != slots[t].end(); ++it) {
      auto next = std::next(it);
      if (next == slots[t].end()) break;
      for (std::size_t a : it->second)
        for (std::size_t b : next->second) g.edges.push_back({a, b, DepEdge::Kind::ProgramOrder});
    }
  }

  const Linearization lin = find_linearization(ts, limits);
  g.steps = lin.steps;
  g.complete = lin.complete;
  std::map<std::string, std::size_t> closes;
  for (const SyncCandidate& s : g.steps) {
    if (s.kind == SyncCandidate::Kind::Close) closes.emplace(s.channel, g.index(s.sender_loc));
    if (s.kind == SyncCandidate::Kind::Sync)
      g.edges.push_back({g.index(s.sender_loc), g.index(s.receiver_loc), DepEdge::Kind::Sync});
  }
  for (const SyncCandidate& s : g.steps) {
    auto c = closes.find(s.channel);
    if (c == closes.end()) continue;
    if (s.kind == SyncCandidate::Kind::RcvClosed)
      g.edges.push_back({c->second, g.index(s.receiver_loc), DepEdge::Kind::CloseBefore});
    if (s.kind == SyncCandidate::Kind::Sync && !ts.threads[s.sender].is_virtual)
      g.edges.push_back({g.index(s.sender_loc), c->second, DepEdge::Kind::SendBeforeClose});
  }

  g.unit_of.assign(g.nodes.size(), DepGraph::npos);
  for (std::size_t u = 0; u < g.steps.size(); ++u)
    for (std::size_t n : step_nodes(g, g.steps[u])) g.unit_of[n] = u;
  std::size_t units = g.steps.size();
  for (std::size_t& u : g.unit_of)
    if (u == DepGraph::npos) u = units++;
  std::vector<std::set<std::size_t>> succ(units);
  std::vector<std::set<std::size_t>> causal(units);
  for (const DepEdge& e : g.edges) {
    if (e.kind == DepEdge::Kind::Sync || g.unit_of[e.from] == g.unit_of[e.to]) continue;
    succ[g.unit_of[e.from]].insert(g.unit_of[e.to]);
    if (e.kind != DepEdge::Kind::SendBeforeClose) causal[g.unit_of[e.from]].insert(g.unit_of[e.to]);
  }
  g.unit_reach = close_units(succ);
  g.causal_reach = close_units(causal);

  g.slot_pred.assign(g.nodes.size(), DepGraph::npos);
  g.slot_committed.assign(g.nodes.size(), DepGraph::npos);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& thread_slots = slots[g.nodes[i].thread];
    auto it = thread_slots.find(g.nodes[i].slot);
    for (std::size_t c : it->second)
      if (g.nodes[c].committed) g.slot_committed[i] = c;
    if (it == thread_slots.begin()) continue;
    for (std::size_t p : std::prev(it)->second)
      if (g.nodes[p].committed) g.slot_pred[i] = p;
  }

  std::sort(g.edges.begin(), g.edges.end(), [](const DepEdge& a, const DepEdge& b) {
    return std::tie(a.from, a.to, a.kind) < std::tie(b.from, b.to, b.kind);
  });
  g.out.assign(g.nodes.size(), {});
  for (std::size_t e = 0; e < g.edges.size(); ++e) g.out[g.edges[e].from].push_back(e);
  return g;
}

namespace {

bool hb_index(const DepGraph& g, std::size_t a, std::size_t b) {
  if (a == b) return false;
  const std::size_t ua = g.unit_of[a];
  const std::size_t ub = g.unit_of[b];
  if (ua == ub) return g.nodes[a].kind == DepNode::Kind::Send;
  return g.unit_reach[ua][ub];
}

/// The pre of `a` must have committed before the pre of `b` is reached.
bool offered_after(const DepGraph& g, std::size_t a, std::size_t b) {
  const std::size_t p = g.slot_pred[b];
  if (p == DepGraph::npos) return false;
  const std::size_t c = g.slot_committed[a];
  if (c == DepGraph::npos) return false;
  return g.unit_of[c] == g.unit_of[p] || g.unit_reach[g.unit_of[c]][g.unit_of[p]];
}

}  // namespace

bool happens_before(const DepGraph& g, Loc a, Loc b) { return hb_index(g, g.index(a), g.index(b)); }

bool concurrent(const DepGraph& g, Loc a, Loc b) {
  return a != b && !happens_before(g, a, b) && !happens_before(g, b, a);
}

bool co_enabled(const DepGraph& g, Loc a, Loc b) {
  const std::size_t x = g.index(a);
  const std::size_t y = g.index(b);
  return x != y && !offered_after(g, x, y) && !offered_after(g, y, x);
}

std::set<std::pair<Loc, Loc>> hb_relation(const DepGraph& g) {
  std::set<std::pair<Loc, Loc>> rel;
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    if (g.unit_of[a] >= g.steps.size()) continue;
    for (std::size_t b = 0; b < g.nodes.size(); ++b)
      if (g.unit_of[b] < g.steps.size() && hb_index(g, a, b)) rel.emplace(g.nodes[a].loc, g.nodes[b].loc);
  }
  return rel;
}

std::vector<std::pair<Loc, Loc>> alt_communications_graph(const DepGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> synced;
  for (const DepEdge& e : g.edges)
    if (e.kind == DepEdge::Kind::Sync) synced.emplace(e.from, e.to);
  std::vector<std::pair<Loc, Loc>> out;
  for (std::size_t s = 0; s < g.nodes.size(); ++s) {
    if (g.nodes[s].kind != DepNode::Kind::Send) continue;
    for (std::size_t r = 0; r < g.nodes.size(); ++r) {
      const DepNode& rn = g.nodes[r];
      if (rn.kind != DepNode::Kind::Recv || rn.channel != g.nodes[s].channel || rn.tid == g.nodes[s].tid) continue;
      if (synced.count({s, r}) || offered_after(g, s, r) || offered_after(g, r, s)) continue;
      out.emplace_back(g.nodes[s].loc, rn.loc);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<Loc, Loc>> close_hazards(const DepGraph& g) {
  std::vector<std::pair<Loc, Loc>> out;
  for (std::size_t c = 0; c < g.nodes.size(); ++c) {
    if (g.nodes[c].kind != DepNode::Kind::Close || !g.nodes[c].committed) continue;
    for (std::size_t s = 0; s < g.nodes.size(); ++s) {
      if (g.nodes[s].kind != DepNode::Kind::Send || g.nodes[s].channel != g.nodes[c].channel) continue;
      if (!g.causal_reach[g.unit_of[s]][g.unit_of[c]]) out.emplace_back(g.nodes[s].loc, g.nodes[c].loc);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GraphSchedules schedules_by_backward_traversal(const DepGraph& g, std::size_t cap) {
  const std::size_t n = g.steps.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (g.unit_reach[u][v]) succ[u].push_back(v);
  GraphSchedules out;
  std::set<std::vector<std::size_t>> orders;
  std::vector<bool> marked(n, false);
  std::vector<std::size_t> reversed;
  std::function<void()> visit = [&] {
    if (out.truncated) return;
    if (reversed.size() == n) {
      orders.emplace(reversed.rbegin(), reversed.rend());
      if (orders.size() >= cap) out.truncated = true;
      return;
    }
    bool progress = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (marked[u]) continue;
      if (!std::all_of(succ[u].begin(), succ[u].end(), [&](std::size_t v) { return marked[v]; })) continue;
      progress = true;
      marked[u] = true;
      reversed.push_back(u);
      visit();
      reversed.pop_back();
      marked[u] = false;
      if (out.truncated) return;
    }
    if (!progress) throw InconsistentTrace("dependency graph has a cycle");
  };
  visit();
  std::set<RunTimeTrace> traces;
  for (const auto& order : orders) {
    RunTimeTrace t;
    for (std::size_t u : order)
      for (TraceEvent& e : candidate_events(g.steps[u])) t.push_back(std::move(e));
    traces.insert(std::move(t));
  }
  out.schedules.assign(traces.begin(), traces.end());
  return out;
}

void check_invariants(const DepGraph& g) {
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    std::size_t po = 0;
    std::size_t sync = 0;
    for (std::size_t e : g.out[n]) {
      const DepEdge& edge = g.edges[e];
      if (edge.kind == DepEdge::Kind::Sync) ++sync;
      if (edge.kind == DepEdge::Kind::ProgramOrder && g.nodes[edge.to].committed) ++po;
    }
    if (po > 1 || sync > 1)
      throw InconsistentTrace("node " + label(g.nodes[n]) + " has more than one outgoing edge of a kind");
  }
}

std::string label(const DepNode& n) {
  const std::string at = "|" + std::to_string(n.loc);
  switch (n.kind) {
    case DepNode::Kind::Send: return n.channel + "!" + at;
    case DepNode::Kind::Recv: return n.channel + "?" + at;
    case DepNode::Kind::Close: return "close " + n.channel + at;
    case DepNode::Kind::SelectDefault: return "sel" + at;
  }
  return {};
}

std::string to_dot(const DepGraph& g) {
  std::ostringstream os;
  os << "digraph deps {\n";
  for (const DepNode& n : g.nodes) {
    os << "  l" << n.loc << " [label=\"" << label(n) << "\"";
    if (!n.committed) os << ", style=dashed";
    os << "];\n";
  }
  for (const DepEdge& e : g.edges) {
    os << "  l" << g.nodes[e.from].loc << " -> l" << g.nodes[e.to].loc;
    if (e.kind == DepEdge::Kind::Sync) os << " [style=bold]";
    if (e.kind == DepEdge::Kind::CloseBefore) os << " [style=dotted]";
    if (e.kind == DepEdge::Kind::SendBeforeClose) os << " [color=gray]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace prepost
