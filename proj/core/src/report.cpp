#include "prepost/report.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

#include "prepost/depgraph.hpp"
#include "prepost/trace_io.hpp"

namespace prepost {

namespace {

using Json = nlohmann::ordered_json;

std::map<Loc, PreOp> options_by_loc(const TraceSet& ts) {
  std::map<Loc, PreOp> out;
  for (const LocalTrace& lt : ts.threads)
    for (const LocalEvent& ev : lt.events)
      if (const auto* pre = std::get_if<PreEvent>(&ev))
        for (const PreOp& op : pre->options) out.emplace(op.loc, op);
  return out;
}

std::string op_label(const std::map<Loc, PreOp>& ops, Loc loc) {
  auto it = ops.find(loc);
  if (it == ops.end()) return "?|" + std::to_string(loc);
  const PreOp& op = it->second;
  const std::string at = "|" + std::to_string(loc);
  switch (op.kind) {
    case PreOp::Kind::Send: return op.channel + "!" + at;
    case PreOp::Kind::Recv: return op.channel + "?" + at;
    case PreOp::Kind::Close: return "close " + op.channel + at;
    case PreOp::Kind::Default: return "sel" + at;
  }
  return {};
}

std::string pending_label(const PendingPre& p) {
  return "T" + std::to_string(p.tid) + ": " + format_event(p.pre);
}

}  // namespace

AnalysisReport analyze(const TraceSet& input, const ReplayLimits& limits) {
  const TraceSet ts = normalize_buffered(input);
  validate(ts);
  AnalysisReport r;
  for (const LocalTrace& lt : ts.threads) (lt.is_virtual ? r.virtual_threads : r.threads)++;
  r.events = ts.event_count();

  const ScheduleSet sched = enumerate_schedules(ts, limits);
  r.schedule_count = sched.schedules.size();
  r.schedules_truncated = sched.truncated;
  for (std::size_t i = 0; i < sched.schedules.size() && i < kScheduleSample; ++i)
    r.schedule_sample.push_back(to_string(sched.schedules[i]));

  const auto ops = options_by_loc(ts);
  r.alternatives = find_alternative_communications(ts, limits);
  for (const AlternativeMatch& m : r.alternatives.matches)
    r.alternative_labels.push_back(op_label(ops, m.send_loc) + " <-> " + op_label(ops, m.recv_loc));

  const DepGraph g = build_graph(ts, limits);
  r.graph_nodes = g.nodes.size();
  r.graph_edges = g.edges.size();
  r.graph_alternatives = alt_communications_graph(g);
  r.close_hazards = close_hazards(g);
  for (const auto& [send, close] : r.close_hazards)
    r.hazard_labels.push_back(op_label(ops, send) + " after " + op_label(ops, close));

  const Linearization lin = find_linearization(ts, limits);
  r.linearization_complete = lin.complete;
  r.residual = residual_report(ts, lin.final_state);
  r.deadlock = r.residual.kind != ResidualReport::Kind::CompletedResidual;
  return r;
}

std::string render_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "threads: " << r.threads << " (virtual: " << r.virtual_threads << ")\n";
  os << "events: " << r.events << "\n";
  os << "schedules: " << r.schedule_count << (r.schedules_truncated ? " (truncated)" : "") << "\n";
  for (const std::string& s : r.schedule_sample) os << "  " << s << "\n";
  os << "alternative communications: " << r.alternatives.matches.size()
     << (r.alternatives.truncated ? " (truncated)" : "") << "\n";
  for (const std::string& s : r.alternative_labels) os << "  " << s << "\n";
  os << "graph alternatives: " << r.graph_alternatives.size() << "\n";
  for (const auto& [s, v] : r.graph_alternatives) os << "  " << s << " <-> " << v << "\n";
  os << "close hazards: " << r.close_hazards.size() << "\n";
  for (const std::string& s : r.hazard_labels) os << "  " << s << "\n";
  os << "residual: " << to_string(r.residual.kind) << "\n";
  os << "pending: " << r.residual.pending.size() << "\n";
  for (const PendingPre& p : r.residual.pending) os << "  " << pending_label(p) << "\n";
  os << "deadlock: " << (r.deadlock ? "yes" : "no") << "\n";
  os << "graph: " << r.graph_nodes << " nodes, " << r.graph_edges << " edges\n";
  return os.str();
}

std::string render_json(const AnalysisReport& r) {
  Json j;
  j["threads"] = r.threads;
  j["virtual_threads"] = r.virtual_threads;
  j["events"] = r.events;
  j["schedules"] = {{"count", r.schedule_count}, {"truncated", r.schedules_truncated}, {"sample", r.schedule_sample}};
  Json alts = Json::array();
  for (std::size_t i = 0; i < r.alternatives.matches.size(); ++i) {
    const AlternativeMatch& m = r.alternatives.matches[i];
    alts.push_back({{"channel", m.channel},
                    {"send", m.send_loc},
                    {"recv", m.recv_loc},
                    {"send_tid", m.send_tid},
                    {"recv_tid", m.recv_tid},
                    {"send_committed", m.send_committed},
                    {"recv_committed", m.recv_committed},
                    {"label", r.alternative_labels[i]}});
  }
  j["alternative_communications"] = {{"count", r.alternatives.matches.size()},
                                     {"truncated", r.alternatives.truncated},
                                     {"matches", alts}};
  Json galts = Json::array();
  for (const auto& [s, v] : r.graph_alternatives) galts.push_back({{"send", s}, {"recv", v}});
  j["graph_alternatives"] = {{"count", r.graph_alternatives.size()}, {"pairs", galts}};
  Json hz = Json::array();
  for (std::size_t i = 0; i < r.close_hazards.size(); ++i)
    hz.push_back({{"send", r.close_hazards[i].first},
                  {"close", r.close_hazards[i].second},
                  {"label", r.hazard_labels[i]}});
  j["close_hazards"] = {{"count", r.close_hazards.size()}, {"hazards", hz}};
  Json pending = Json::array();
  for (const PendingPre& p : r.residual.pending) pending.push_back({{"tid", p.tid}, {"pre", format_event(p.pre)}});
  j["residual"] = {{"kind", to_string(r.residual.kind)}, {"pending", pending}};
  j["deadlock"] = r.deadlock;
  j["graph"] = {{"nodes", r.graph_nodes}, {"edges", r.graph_edges}};
  return j.dump(2) + "\n";
}

}  // namespace prepost
