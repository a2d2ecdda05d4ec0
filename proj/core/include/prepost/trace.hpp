#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prepost/program.hpp"

namespace prepost {

struct PreOp {
  enum class Kind { Send, Recv, Close, Default };

  Kind kind = Kind::Send;
  std::string channel;  // empty for Default
  Loc loc = 0;

  friend bool operator==(const PreOp&, const PreOp&) = default;
};

/// The operations a thread is about to offer; one per select case.
struct PreEvent {
  std::vector<PreOp> options;

  friend bool operator==(const PreEvent&, const PreEvent&) = default;
};

/// The one operation that committed.
struct PostEvent {
  enum class Kind { Send, Recv, AsyncSend, Select, Close };

  Kind kind = Kind::Send;
  std::string channel;  // empty for Select
  Loc loc = 0;
  Tid partner = 0;  // Recv: sender id (0 = closed channel); AsyncSend: virtual id

  friend bool operator==(const PostEvent&, const PostEvent&) = default;
};

using LocalEvent = std::variant<PreEvent, PostEvent>;

struct LocalTrace {
  Tid tid = 0;
  bool is_virtual = false;
  std::vector<LocalEvent> events;

  friend bool operator==(const LocalTrace&, const LocalTrace&) = default;
};

/// Local traces of one run, sorted by ascending tid.
struct TraceSet {
  std::vector<LocalTrace> threads;

  const LocalTrace* find(Tid tid) const;
  std::size_t event_count() const;

  friend bool operator==(const TraceSet&, const TraceSet&) = default;
};

/// The option a committed post event corresponds to.
PreOp committed_option(const PostEvent& post);
bool offers(const PreEvent& pre, const PostEvent& post);

/// Checks the pre/post alternation, option well-formedness and ordering of
/// tids. Throws InconsistentTrace naming the offending thread and index.
void validate(const LocalTrace& lt);
void validate(const TraceSet& ts);

/// List encoding of a logged event. With locations off this is exactly
/// pre ≡ [0, b1, ..., bn], post ≡ [1, b], x! ≡ [#x, 1], x? ≡ [#x, 0],
/// i#x? ≡ [#x, 0, i]. Closes use code 2, defaults [0, 3], and an
/// asynchronous post is [2, x!, n]. With locations on, each operation list
/// carries its location as the last element.
Value encode(const LocalEvent& ev, bool with_locations = true);
/// Inverse of encode. Throws DecodeError.
LocalEvent decode(const Value& v, bool with_locations = true);

/// Moves every buffered send (pre followed by an asynchronous post) into its
/// own virtual trace, as if executed by a separate thread. Throws
/// InconsistentTrace on a duplicate virtual id.
TraceSet normalize_buffered(const TraceSet& ts);

}  // namespace prepost
