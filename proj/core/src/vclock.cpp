#include "prepost/vclock.hpp"

#include <algorithm>
#include <atomic>
#include <map>

#include "prepost/errors.hpp"

namespace prepost {

namespace {

std::atomic<std::uint64_t> next_analysis{1};

ClockedEvent clocked(TraceEvent e, VectorClock cs, std::uint64_t analysis, std::uint64_t pair) {
  return {std::move(e), std::move(cs), analysis, pair};
}

}  // namespace

VectorClock vc_inc(VectorClock cs, std::size_t i) {
  if (i >= cs.size()) throw Error("clock index " + std::to_string(i) + " out of range");
  ++cs[i];
  return cs;
}

VectorClock vc_max(const VectorClock& a, const VectorClock& b) {
  if (a.size() != b.size()) throw Error("vector clocks differ in length");
  VectorClock out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::max(a[k], b[k]);
  return out;
}

bool vc_less(const VectorClock& a, const VectorClock& b) {
  if (a.size() != b.size()) throw Error("vector clocks differ in length");
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    strict = strict || a[k] < b[k];
  }
  return strict;
}

ClockAssignment assign_clocks(const TraceSet& ts, const std::vector<SyncCandidate>& steps) {
  using K = SyncCandidate::Kind;
  ClockAssignment ca;
  const std::uint64_t analysis = next_analysis++;
  for (const LocalTrace& lt : ts.threads) ca.index_tids.push_back(lt.tid);
  std::vector<VectorClock> clocks(ts.threads.size(), VectorClock(ts.threads.size(), 0));
  std::map<std::string, VectorClock> close_clock;
  std::map<std::string, VectorClock> sent_clock;  // join of synchronous sends per channel
  std::uint64_t pair = 0;
  for (const SyncCandidate& s : steps) {
    const RunTimeTrace events = candidate_events(s);
    switch (s.kind) {
      case K::Sync: {
        const VectorClock cs = vc_max(vc_inc(clocks[s.sender], s.sender), vc_inc(clocks[s.receiver], s.receiver));
        clocks[s.sender] = cs;
        clocks[s.receiver] = cs;
        ++pair;
        if (!ts.threads[s.sender].is_virtual) {
          auto [it, fresh] = sent_clock.emplace(s.channel, cs);
          if (!fresh) it->second = vc_max(it->second, cs);
        }
        ca.events.push_back(clocked(events[0], cs, analysis, pair));
        ca.events.push_back(clocked(events[1], cs, analysis, pair));
        break;
      }
      case K::Close:
        clocks[s.sender] = vc_inc(clocks[s.sender], s.sender);
        if (auto it = sent_clock.find(s.channel); it != sent_clock.end())
          clocks[s.sender] = vc_max(clocks[s.sender], it->second);
        close_clock[s.channel] = clocks[s.sender];
        ca.events.push_back(clocked(events[0], clocks[s.sender], analysis, 0));
        break;
      case K::RcvClosed: {
        VectorClock cs = vc_inc(clocks[s.receiver], s.receiver);
        if (auto it = close_clock.find(s.channel); it != close_clock.end()) cs = vc_max(cs, it->second);
        clocks[s.receiver] = cs;
        ca.events.push_back(clocked(events[0], cs, analysis, 0));
        break;
      }
      case K::Default:
        clocks[s.sender] = vc_inc(clocks[s.sender], s.sender);
        ca.events.push_back(clocked(events[0], clocks[s.sender], analysis, 0));
        break;
    }
  }
  return ca;
}

ClockAssignment assign_clocks(const TraceSet& ts, const ReplayLimits& limits) {
  const Linearization lin = find_linearization(ts, limits);
  ClockAssignment ca = assign_clocks(ts, lin.steps);
  ca.complete = lin.complete;
  return ca;
}

bool hb_by_clock(const ClockedEvent& a, const ClockedEvent& b) {
  if (a.analysis != b.analysis) throw Error("clocked events come from different analyses");
  if (a.event == b.event) throw Error("an event is not ordered with itself");
  if (a.pair != 0 && a.pair == b.pair) return a.event.kind == TraceEvent::Kind::Send;
  return vc_less(a.clock, b.clock);
}

std::set<std::pair<Loc, Loc>> clock_relation(const ClockAssignment& ca) {
  std::set<std::pair<Loc, Loc>> rel;
  for (std::size_t i = 0; i < ca.events.size(); ++i)
    for (std::size_t j = 0; j < ca.events.size(); ++j)
      if (i != j && hb_by_clock(ca.events[i], ca.events[j])) rel.emplace(ca.events[i].event.loc, ca.events[j].event.loc);
  return rel;
}

}  // namespace prepost
