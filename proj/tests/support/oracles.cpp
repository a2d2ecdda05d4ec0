#include "oracles.hpp"

#include <map>
#include <memory>
#include <tuple>

namespace prepost::oracle {

namespace {

struct Explorer {
  std::size_t budget;
  std::size_t configs = 0;

  void charge() {
    if (++configs > budget) throw BudgetExceeded("oracle budget exceeded");
  }
};

bool try_step(const Config& cfg, const StepChoice& c, Config& next, RunTimeTrace& events) {
  try {
    auto [n, ev] = step(cfg, c);
    next = std::move(n);
    events = std::move(ev);
    return true;
  } catch (const ChannelCrash&) {
    return false;
  }
}

void explore_runs(Explorer& ex, const Config& cfg, RunTimeTrace& prefix, Outcomes& out,
                  std::set<std::string>& seen) {
  const std::string key = config_key(cfg) + '#' + to_string(prefix);
  if (!seen.insert(key).second) return;
  ex.charge();
  if (main_finished(cfg)) {
    out.completed.insert(prefix);
    return;
  }
  const std::vector<StepChoice> choices = enabled_steps(cfg);
  if (choices.empty()) {
    out.deadlocked.insert(prefix);
    return;
  }
  for (const StepChoice& c : choices) {
    Config next;
    RunTimeTrace events;
    if (!try_step(cfg, c, next, events)) continue;
    const std::size_t mark = prefix.size();
    prefix.insert(prefix.end(), events.begin(), events.end());
    explore_runs(ex, next, prefix, out, seen);
    prefix.resize(mark);
  }
}

// Schedule ids of buffered messages mapped to the interpreter's virtual ids.
// Normalized traces number virtual senders differently, so they match up to
// a consistent renaming.
using VirtualMap = std::map<Tid, Tid>;

bool same_tid(Tid want, Tid got, VirtualMap& vmap) {
  if (got < kVirtualTidBase) return want == got;
  auto [it, fresh] = vmap.emplace(want, got);
  if (!fresh) return it->second == got;
  for (const auto& [w, g] : vmap)
    if (g == got && w != want) return false;
  return true;
}

bool same_event(const TraceEvent& want, const TraceEvent& got, VirtualMap& vmap) {
  return want.kind == got.kind && want.channel == got.channel && want.loc == got.loc &&
         want.partner_loc == got.partner_loc && same_tid(want.tid, got.tid, vmap) && same_tid(want.from, got.from, vmap);
}

std::string map_key(const VirtualMap& vmap) {
  std::string k;
  for (const auto& [w, g] : vmap) k += std::to_string(w) + '=' + std::to_string(g) + ',';
  return k;
}

bool realize_from(Explorer& ex, const Config& cfg, const RunTimeTrace& t, std::size_t at, const VirtualMap& vmap,
                  std::set<std::tuple<std::string, std::size_t, std::string>>& dead) {
  if (at == t.size() && main_finished(cfg)) return true;
  const auto key = std::make_tuple(config_key(cfg), at, map_key(vmap));
  if (dead.count(key)) return false;
  ex.charge();
  const std::vector<StepChoice> choices = enabled_steps(cfg);
  if (at == t.size() && choices.empty()) return true;
  for (const StepChoice& c : choices) {
    Config next;
    RunTimeTrace events;
    if (!try_step(cfg, c, next, events)) continue;
    if (at + events.size() > t.size()) continue;
    VirtualMap m = vmap;
    bool match = true;
    for (std::size_t i = 0; i < events.size() && match; ++i) match = same_event(t[at + i], events[i], m);
    if (match && realize_from(ex, next, t, at + events.size(), m, dead)) return true;
  }
  dead.insert(key);
  return false;
}

}  // namespace

Outcomes all_runs(const Program& p, std::size_t max_configs) {
  Explorer ex{max_configs};
  Outcomes out;
  RunTimeTrace prefix;
  std::set<std::string> seen;
  explore_runs(ex, initial_config(std::make_shared<const Program>(p)), prefix, out, seen);
  out.configs = ex.configs;
  return out;
}

bool realizable(const Program& p, const RunTimeTrace& t, std::size_t max_configs) {
  Explorer ex{max_configs};
  std::set<std::tuple<std::string, std::size_t, std::string>> dead;
  return realize_from(ex, initial_config(std::make_shared<const Program>(p)), t, 0, {}, dead);
}

std::string simulate_erased(const Program& original, const RunResult& instrumented) {
  Config cfg = initial_config(std::make_shared<const Program>(original));
  RunTimeTrace emitted;
  std::size_t index = 0;
  for (const StepSignature& want : instrumented.schedule) {
    ++index;
    if (want.instrumentation) continue;
    const std::vector<StepChoice> choices = enabled_steps(cfg);
    bool found = false;
    for (const StepChoice& c : choices) {
      if (!(signature(cfg, c) == want)) continue;
      try {
        RunTimeTrace ev = apply_step(cfg, c);
        emitted.insert(emitted.end(), ev.begin(), ev.end());
      } catch (const ChannelCrash&) {
        if (instrumented.status != RunStatus::Crashed) return "unexpected crash at step " + std::to_string(index);
        return {};
      }
      found = true;
      break;
    }
    if (!found) return "step " + std::to_string(index) + " not enabled in the original";
  }
  if (emitted != instrumented.trace) return "traces differ: " + to_string(emitted) + " vs " + to_string(instrumented.trace);
  if (instrumented.status == RunStatus::Deadlock && !enabled_steps(cfg).empty())
    return "original can still move where the instrumented run deadlocked";
  if (instrumented.status == RunStatus::Completed && !main_finished(cfg)) return "original main did not finish";
  return {};
}

std::size_t count_linear_extensions(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  if (n > 24) throw Error("too many elements for subset DP");
  std::vector<std::uint32_t> preds(n, 0);
  for (auto [a, b] : edges) preds[b] |= 1u << a;
  std::vector<std::size_t> ways(std::size_t{1} << n, 0);
  ways[0] = 1;
  for (std::uint32_t mask = 0; mask < ways.size(); ++mask) {
    if (ways[mask] == 0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      if ((preds[i] & mask) != preds[i]) continue;
      ways[mask | (1u << i)] += ways[mask];
    }
  }
  return ways.back();
}

std::set<std::pair<Loc, Loc>> intersect_orders(const std::vector<RunTimeTrace>& traces) {
  std::set<std::pair<Loc, Loc>> result;
  bool first = true;
  for (const RunTimeTrace& t : traces) {
    std::set<std::pair<Loc, Loc>> here;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j)
        if (t[i].loc != t[j].loc) here.insert({t[i].loc, t[j].loc});
    if (first) {
      result = std::move(here);
      first = false;
    } else {
      std::set<std::pair<Loc, Loc>> both;
      for (const auto& p : result)
        if (here.count(p)) both.insert(p);
      result = std::move(both);
    }
  }
  return result;
}

}  // namespace prepost::oracle
