#pragma once

#include <cstdint>
#include <string>

#include "prepost/instrument.hpp"
#include "prepost/program.hpp"

namespace prepost {

/// Extra cost of one tracing method, in payload words and communication links.
struct MethodCost {
  std::uint64_t per_message_extra_words = 0;
  std::uint64_t extra_links = 0;
  std::uint64_t total_extra_words = 0;
};

/// Pre/post tracing piggybacks the sender id: one word, no extra channel.
/// Vector-clock tracing ships a clock entry per thread and needs a reply
/// link per message to return the receiver's clock.
struct OverheadStats {
  std::uint64_t messages = 0;  // committed send/receive pairs
  std::uint64_t threads = 0;   // real threads, main included
  std::uint64_t trace_events = 0;
  MethodCost prepost;
  MethodCost vclock;
};

OverheadStats overhead_from(const Recording& rec);
/// Instruments and runs `p` once with `seed`.
OverheadStats measure_overhead(const Program& p, std::uint64_t seed, std::size_t max_steps = kDefaultMaxSteps);

std::string render_overhead(const OverheadStats& s);

}  // namespace prepost
