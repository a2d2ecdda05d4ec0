#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "prepost/replay.hpp"
#include "prepost/trace.hpp"

namespace prepost {

inline constexpr std::size_t kScheduleSample = 5;

struct AnalysisReport {
  std::size_t threads = 0;
  std::size_t virtual_threads = 0;
  std::size_t events = 0;

  std::size_t schedule_count = 0;
  bool schedules_truncated = false;
  std::vector<std::string> schedule_sample;  // first kScheduleSample, rendered

  AlternativeCommunications alternatives;
  std::vector<std::string> alternative_labels;  // `x!|5 <-> x?|1`
  std::vector<std::pair<Loc, Loc>> graph_alternatives;
  std::vector<std::pair<Loc, Loc>> close_hazards;
  std::vector<std::string> hazard_labels;  // `x!|1 after close x|3`

  ResidualReport residual;
  bool linearization_complete = true;
  bool deadlock = false;

  std::size_t graph_nodes = 0;
  std::size_t graph_edges = 0;
};

/// Normalizes buffered sends, then runs the replay and graph analyses.
AnalysisReport analyze(const TraceSet& ts, const ReplayLimits& limits = {});

std::string render_text(const AnalysisReport& r);
/// JSON with a fixed key order.
std::string render_json(const AnalysisReport& r);

}  // namespace prepost
