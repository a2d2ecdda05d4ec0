#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "prepost/trace.hpp"

namespace prepost {

/// One line per thread: `T<tid>: ev; ev; ...`, or `V<tid>: ...` for a
/// virtual trace. A thread without events is written `T<tid>:`.
std::string format_event(const LocalEvent& ev);
std::string format_trace_set(const TraceSet& ts);

/// Inverse of format_trace_set. Blank lines and lines starting with `//`
/// are skipped. Throws TraceFormatError with the 1-based line number.
TraceSet parse_trace_set(std::string_view text);

void write_trace_file(const TraceSet& ts, const std::filesystem::path& path);
TraceSet read_trace_file(const std::filesystem::path& path);

}  // namespace prepost
