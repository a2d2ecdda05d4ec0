#include "prepost/overhead.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace prepost {

OverheadStats overhead_from(const Recording& rec) {
  OverheadStats s;
  s.messages = static_cast<std::uint64_t>(std::count_if(rec.actual.begin(), rec.actual.end(), [](const TraceEvent& e) {
    return e.kind == TraceEvent::Kind::Send;
  }));
  s.threads = static_cast<std::uint64_t>(rec.result.thread_count);
  s.trace_events = rec.raw.event_count();
  s.prepost = {1, 0, s.messages};
  s.vclock = {s.threads, s.messages, s.messages * s.threads};
  return s;
}

OverheadStats measure_overhead(const Program& p, std::uint64_t seed, std::size_t max_steps) {
  return overhead_from(record(p, seed, max_steps));
}

std::string render_overhead(const OverheadStats& s) {
  std::ostringstream os;
  os << "messages: " << s.messages << "\n"
     << "threads: " << s.threads << "\n"
     << "trace events: " << s.trace_events << "\n";
  os << std::left << std::setw(10) << "method" << std::right << std::setw(16) << "words/message" << std::setw(14)
     << "extra links" << std::setw(14) << "extra words" << "\n";
  auto row = [&](const char* name, const MethodCost& c) {
    os << std::left << std::setw(10) << name << std::right << std::setw(16) << c.per_message_extra_words
       << std::setw(14) << c.extra_links << std::setw(14) << c.total_extra_words << "\n";
  };
  row("prepost", s.prepost);
  row("vclock", s.vclock);
  return os.str();
}

}  // namespace prepost
