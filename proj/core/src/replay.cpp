#include "prepost/replay.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace prepost {

namespace {

const PreEvent* head_pre(const LocalTrace& lt, std::size_t pos) {
  return pos < lt.events.size() ? std::get_if<PreEvent>(&lt.events[pos]) : nullptr;
}

const PostEvent* head_post(const LocalTrace& lt, std::size_t pos) {
  if (!head_pre(lt, pos) || pos + 1 >= lt.events.size()) return nullptr;
  return std::get_if<PostEvent>(&lt.events[pos + 1]);
}

std::size_t index_of(const TraceSet& ts, Tid tid) {
  const LocalTrace* lt = ts.find(tid);
  return lt ? static_cast<std::size_t>(lt - ts.threads.data()) : ts.threads.size();
}

TraceEvent event(TraceEvent::Kind k, Tid tid, Tid from, const std::string& ch, Loc loc, Loc partner_loc) {
  TraceEvent e;
  e.kind = k;
  e.tid = tid;
  e.from = from;
  e.channel = ch;
  e.loc = loc;
  e.partner_loc = partner_loc;
  return e;
}

/// Reachable replay states, deduplicated by key.
struct StateGraph {
  std::vector<ReplayState> states;
  std::vector<std::vector<std::size_t>> succ;
  bool truncated = false;
};

/// Keeps a sync candidate, given the state it fires from.
using CandidateFilter = std::function<bool(const ReplayState&, const SyncCandidate&)>;

StateGraph explore(const TraceSet& ts, std::size_t max_states, const CandidateFilter& keep = {}) {
  StateGraph g;
  std::unordered_map<std::string, std::size_t> ids;
  ReplayState init = initial_replay_state(ts);
  ids.emplace(init.key(), 0);
  g.states.push_back(std::move(init));
  g.succ.emplace_back();
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    for (const SyncCandidate& c : replay_choices(ts, g.states[i])) {
      if (keep && !keep(g.states[i], c)) continue;
      ReplayState next = replay_apply(ts, g.states[i], c);
      next.emitted.clear();
      auto [it, fresh] = ids.emplace(next.key(), g.states.size());
      if (fresh) {
        if (g.states.size() >= max_states) {
          ids.erase(it);
          g.truncated = true;
          continue;
        }
        g.states.push_back(std::move(next));
        g.succ.emplace_back();
      }
      g.succ[i].push_back(it->second);
    }
  }
  return g;
}

/// States from which a state satisfying `goal` is reachable. Every step
/// consumes events, so visiting states by decreasing consumption count
/// settles each state after all of its successors.
std::vector<bool> coaccessible(const StateGraph& g, const std::function<bool(const ReplayState&)>& goal) {
  std::vector<std::size_t> order(g.states.size());
  std::vector<std::size_t> weight(g.states.size(), 0);
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    order[i] = i;
    for (std::size_t p : g.states[i].pos) weight[i] += p;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
  std::vector<bool> co(g.states.size(), false);
  for (std::size_t i : order) {
    co[i] = goal(g.states[i]);
    for (std::size_t s : g.succ[i]) co[i] = co[i] || co[s];
  }
  return co;
}

}  // namespace

std::string ReplayState::key() const {
  std::string k;
  for (std::size_t p : pos) k += std::to_string(p) + ',';
  k += '|';
  for (const auto& [ch, tid] : closed) k += ch + ':' + std::to_string(tid) + ',';
  return k;
}

ReplayState initial_replay_state(const TraceSet& ts) {
  ReplayState rs;
  rs.pos.assign(ts.threads.size(), 0);
  return rs;
}

std::vector<SyncCandidate> replay_choices(const TraceSet& ts, const ReplayState& rs) {
  using K = SyncCandidate::Kind;
  std::vector<SyncCandidate> out;
  for (std::size_t j = 0; j < ts.threads.size(); ++j) {
    const LocalTrace& lt = ts.threads[j];
    const PostEvent* post = head_post(lt, rs.pos[j]);
    if (!post) continue;
    switch (post->kind) {
      case PostEvent::Kind::Select:
        out.push_back({K::Default, j, j, lt.tid, lt.tid, "", post->loc, post->loc});
        break;
      case PostEvent::Kind::Close:
        out.push_back({K::Close, j, j, lt.tid, lt.tid, post->channel, post->loc, post->loc});
        break;
      case PostEvent::Kind::Recv: {
        if (post->partner == kClosedSenderTid) {
          if (rs.closed.count(post->channel))
            out.push_back({K::RcvClosed, j, j, 0, lt.tid, post->channel, 0, post->loc});
          break;
        }
        const std::size_t i = index_of(ts, post->partner);
        if (i == ts.threads.size() || i == j) break;
        // A thread sending on a closed channel crashes; only buffered
        // messages are delivered after the close.
        if (!ts.threads[i].is_virtual && rs.closed.count(post->channel)) break;
        const PostEvent* sent = head_post(ts.threads[i], rs.pos[i]);
        if (sent && sent->kind == PostEvent::Kind::Send && sent->channel == post->channel)
          out.push_back({K::Sync, i, j, post->partner, lt.tid, post->channel, sent->loc, post->loc});
        break;
      }
      case PostEvent::Kind::Send:
      case PostEvent::Kind::AsyncSend:
        break;  // fired from the receiving side
    }
  }
  std::sort(out.begin(), out.end(), [](const SyncCandidate& a, const SyncCandidate& b) {
    return std::min(a.sender, a.receiver) < std::min(b.sender, b.receiver);
  });
  return out;
}

RunTimeTrace candidate_events(const SyncCandidate& c) {
  using K = SyncCandidate::Kind;
  switch (c.kind) {
    case K::Sync:
      return {event(TraceEvent::Kind::Send, c.sender_tid, 0, c.channel, c.sender_loc, c.receiver_loc),
              event(TraceEvent::Kind::Recv, c.receiver_tid, c.sender_tid, c.channel, c.receiver_loc, c.sender_loc)};
    case K::RcvClosed:
      return {event(TraceEvent::Kind::Recv, c.receiver_tid, kClosedSenderTid, c.channel, c.receiver_loc, 0)};
    case K::Default:
      return {event(TraceEvent::Kind::Default, c.sender_tid, 0, "", c.sender_loc, 0)};
    case K::Close:
      return {event(TraceEvent::Kind::Close, c.sender_tid, 0, c.channel, c.sender_loc, 0)};
  }
  return {};
}

ReplayState replay_apply(const TraceSet&, ReplayState rs, const SyncCandidate& c) {
  using K = SyncCandidate::Kind;
  switch (c.kind) {
    case K::Sync:
      rs.pos[c.sender] += 2;
      rs.pos[c.receiver] += 2;
      break;
    case K::RcvClosed:
      rs.pos[c.receiver] += 2;
      break;
    case K::Default:
      rs.pos[c.sender] += 2;
      break;
    case K::Close:
      rs.pos[c.sender] += 2;
      rs.closed.emplace(c.channel, c.sender_tid);
      break;
  }
  for (TraceEvent& e : candidate_events(c)) rs.emitted.push_back(std::move(e));
  return rs;
}

bool is_residual(const TraceSet& ts, const ReplayState& rs) {
  for (std::size_t i = 0; i < ts.threads.size(); ++i) {
    const LocalTrace& lt = ts.threads[i];
    const std::size_t left = lt.events.size() - rs.pos[i];
    if (left == 0 || left == 1) continue;
    if (lt.is_virtual && rs.pos[i] == 0) continue;
    return false;
  }
  return true;
}

bool is_accepting(const TraceSet& ts, const ReplayState& rs) {
  const std::size_t main = index_of(ts, kMainTid);
  if (main != ts.threads.size() && rs.pos[main] != ts.threads[main].events.size()) return false;
  return is_residual(ts, rs);
}

ScheduleSet enumerate_schedules(const TraceSet& ts, const ReplayLimits& limits) {
  ScheduleSet out;
  std::set<RunTimeTrace> found;
  // Prune states known not to reach a residual state. Residual states have
  // no choices left, so every schedule is a maximal path.
  std::unordered_set<std::string> dead;
  std::function<bool(const ReplayState&)> dfs = [&](const ReplayState& rs) -> bool {
    if (out.truncated) return true;
    if (++out.states > limits.max_states) {
      out.truncated = true;
      return true;
    }
    bool live = false;
    if (is_residual(ts, rs)) {
      found.insert(rs.emitted);
      live = true;
      if (found.size() >= limits.max_schedules) {
        out.truncated = true;
        return true;
      }
    }
    const std::vector<SyncCandidate> choices = replay_choices(ts, rs);
    for (const SyncCandidate& c : choices) {
      ReplayState next = replay_apply(ts, rs, c);
      const std::string k = next.key();
      if (dead.count(k)) continue;
      if (dfs(next)) live = true;
      else dead.insert(k);
      if (out.truncated) return true;
    }
    return live;
  };
  dfs(initial_replay_state(ts));
  out.schedules.assign(found.begin(), found.end());
  return out;
}

namespace {

std::optional<ReplayState> follow(const TraceSet& ts, const RunTimeTrace& t, std::vector<SyncCandidate>* steps) {
  ReplayState rs = initial_replay_state(ts);
  std::size_t at = 0;
  while (at < t.size()) {
    bool advanced = false;
    for (const SyncCandidate& c : replay_choices(ts, rs)) {
      const RunTimeTrace ev = candidate_events(c);
      if (at + ev.size() > t.size() || !std::equal(ev.begin(), ev.end(), t.begin() + static_cast<std::ptrdiff_t>(at)))
        continue;
      rs = replay_apply(ts, std::move(rs), c);
      if (steps) steps->push_back(c);
      at += ev.size();
      advanced = true;
      break;
    }
    if (!advanced) return std::nullopt;
  }
  return rs;
}

}  // namespace

std::optional<std::vector<SyncCandidate>> steps_for(const TraceSet& ts, const RunTimeTrace& t) {
  std::vector<SyncCandidate> steps;
  if (!follow(ts, t, &steps)) return std::nullopt;
  return steps;
}

bool contains_actual(const TraceSet& ts, const RunTimeTrace& t) {
  const auto rs = follow(ts, t, nullptr);
  return rs && is_residual(ts, *rs);
}

std::vector<AlternativeMatch> find_alternative_matches(const TraceSet& ts, const ReplayState& rs) {
  std::vector<AlternativeMatch> out;
  for (std::size_t i = 0; i < ts.threads.size(); ++i) {
    const LocalTrace& si = ts.threads[i];
    const PreEvent* spre = head_pre(si, rs.pos[i]);
    if (!spre) continue;
    const PostEvent* spost = head_post(si, rs.pos[i]);
    for (const PreOp& sop : spre->options) {
      if (sop.kind != PreOp::Kind::Send) continue;
      for (std::size_t j = 0; j < ts.threads.size(); ++j) {
        if (j == i) continue;
        const LocalTrace& rj = ts.threads[j];
        const PreEvent* rpre = head_pre(rj, rs.pos[j]);
        if (!rpre) continue;
        const PostEvent* rpost = head_post(rj, rs.pos[j]);
        for (const PreOp& rop : rpre->options) {
          if (rop.kind != PreOp::Kind::Recv || rop.channel != sop.channel) continue;
          const bool sent_here = spost && spost->kind == PostEvent::Kind::Send && spost->loc == sop.loc;
          const bool received_from_here = rpost && rpost->kind == PostEvent::Kind::Recv &&
                                          rpost->loc == rop.loc && rpost->partner == si.tid;
          if (sent_here && received_from_here) continue;
          out.push_back({sop.channel, sop.loc, rop.loc, si.tid, rj.tid, spost != nullptr, rpost != nullptr});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const AlternativeMatch& a, const AlternativeMatch& b) {
    return std::tie(a.send_loc, a.recv_loc) < std::tie(b.send_loc, b.recv_loc);
  });
  return out;
}

std::vector<AlternativeMatch> find_alternative_matches(const TraceSet& ts) {
  return find_alternative_matches(ts, initial_replay_state(ts));
}

AlternativeCommunications find_alternative_communications(const TraceSet& ts, const ReplayLimits& limits) {
  AlternativeCommunications out;
  const StateGraph g = explore(ts, limits.max_states);
  out.truncated = g.truncated;
  out.states = g.states.size();
  std::map<std::pair<Loc, Loc>, AlternativeMatch> seen;
  for (const ReplayState& rs : g.states)
    for (AlternativeMatch& m : find_alternative_matches(ts, rs)) seen.emplace(std::pair{m.send_loc, m.recv_loc}, m);
  for (auto& [k, m] : seen) out.matches.push_back(std::move(m));
  return out;
}

ResidualReport residual_report(const TraceSet& ts, const ReplayState& rs) {
  ResidualReport r;
  for (std::size_t i = 0; i < ts.threads.size(); ++i) {
    const LocalTrace& lt = ts.threads[i];
    if (lt.is_virtual) continue;
    if (lt.events.size() - rs.pos[i] == 1) r.pending.push_back({lt.tid, std::get<PreEvent>(lt.events[rs.pos[i]])});
  }
  if (!is_residual(ts, rs)) r.kind = ResidualReport::Kind::NotResidual;
  else if (!is_accepting(ts, rs)) r.kind = ResidualReport::Kind::StuckWithPending;
  return r;
}

std::string to_string(ResidualReport::Kind k) {
  switch (k) {
    case ResidualReport::Kind::CompletedResidual: return "completed";
    case ResidualReport::Kind::StuckWithPending: return "stuck";
    case ResidualReport::Kind::NotResidual: return "not-residual";
  }
  return {};
}

Linearization find_linearization(const TraceSet& ts, const ReplayLimits& limits) {
  Linearization best;
  const ReplayState start = initial_replay_state(ts);
  best.final_state = start;
  std::vector<SyncCandidate> path;
  std::unordered_set<std::string> visited;
  std::size_t states = 0;
  std::function<bool(const ReplayState&)> dfs = [&](const ReplayState& rs) -> bool {
    if (++states > limits.max_states) {
      best.truncated = true;
      return true;
    }
    if (is_residual(ts, rs)) {
      best.steps = path;
      best.final_state = rs;
      best.complete = true;
      return true;
    }
    if (path.size() > best.steps.size()) {
      best.steps = path;
      best.final_state = rs;
    }
    for (const SyncCandidate& c : replay_choices(ts, rs)) {
      ReplayState next = replay_apply(ts, rs, c);
      if (!visited.insert(next.key()).second) continue;
      path.push_back(c);
      if (dfs(next)) return true;
      path.pop_back();
    }
    return false;
  };
  dfs(start);
  return best;
}

OrderRelation exhaustive_order(const TraceSet& ts, const ReplayLimits& limits) {
  OrderRelation out;
  // Schedules are orderings of one set of synchronizations. A receive
  // names only the sender's thread, so fix every pairing to the one the
  // reference linearization chose; other pairings are alternative
  // communications.
  const Linearization lin = find_linearization(ts, limits);
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> partner;
  ReplayState at = initial_replay_state(ts);
  for (const SyncCandidate& c : lin.steps) {
    if (c.kind == SyncCandidate::Kind::Sync) partner[{c.receiver, at.pos[c.receiver]}] = {c.sender, at.pos[c.sender]};
    at = replay_apply(ts, std::move(at), c);
  }
  const CandidateFilter keep = [&](const ReplayState& rs, const SyncCandidate& c) {
    if (c.kind != SyncCandidate::Kind::Sync) return true;
    auto it = partner.find({c.receiver, rs.pos[c.receiver]});
    return it != partner.end() && it->second == std::pair{c.sender, rs.pos[c.sender]};
  };
  const StateGraph g = explore(ts, limits.max_states, keep);
  out.truncated = g.truncated || !lin.complete;
  out.states = g.states.size();
  const std::vector<bool> co = coaccessible(g, [&](const ReplayState& rs) { return is_residual(ts, rs); });

  // Committed events are pre/post pairs, identified by (thread, pair index).
  struct Ev {
    std::size_t thread;
    std::size_t end;  // consumed once pos[thread] >= end
    Loc loc;
    bool recv;
  };
  std::vector<Ev> evs;
  for (std::size_t t = 0; t < ts.threads.size(); ++t) {
    const auto& events = ts.threads[t].events;
    for (std::size_t k = 1; k < events.size(); k += 2) {
      const auto& post = std::get<PostEvent>(events[k]);
      evs.push_back({t, k + 1, post.loc, post.kind == PostEvent::Kind::Recv});
    }
  }
  // must[e][t]: least position of thread t over co-accessible states where e is consumed.
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> must(evs.size(), std::vector<std::size_t>(ts.threads.size(), none));
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    if (!co[s]) continue;
    const auto& pos = g.states[s].pos;
    for (std::size_t e = 0; e < evs.size(); ++e) {
      if (pos[evs[e].thread] < evs[e].end) continue;
      for (std::size_t t = 0; t < pos.size(); ++t) must[e][t] = std::min(must[e][t], pos[t]);
    }
  }
  auto consumed = [&](std::size_t e) { return must[e][evs[e].thread] != none; };
  auto requires_ = [&](std::size_t b, std::size_t a) { return must[b][evs[a].thread] >= evs[a].end; };
  for (std::size_t a = 0; a < evs.size(); ++a) {
    if (!consumed(a)) continue;
    out.events.insert(evs[a].loc);
    for (std::size_t b = 0; b < evs.size(); ++b) {
      if (a == b || !consumed(b) || !requires_(b, a)) continue;
      // Consumed in the same step: a rendezvous, ordered send first.
      if (requires_(a, b) && evs[a].recv) continue;
      out.before.emplace(evs[a].loc, evs[b].loc);
    }
  }
  return out;
}

}  // namespace prepost
