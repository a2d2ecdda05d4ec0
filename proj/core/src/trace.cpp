#include "prepost/trace.hpp"

#include <algorithm>
#include <set>

#include "prepost/errors.hpp"

namespace prepost {

const LocalTrace* TraceSet::find(Tid tid) const {
  auto it = std::lower_bound(threads.begin(), threads.end(), tid,
                             [](const LocalTrace& lt, Tid t) { return lt.tid < t; });
  return it != threads.end() && it->tid == tid ? &*it : nullptr;
}

std::size_t TraceSet::event_count() const {
  std::size_t n = 0;
  for (const LocalTrace& lt : threads) n += lt.events.size();
  return n;
}

PreOp committed_option(const PostEvent& post) {
  switch (post.kind) {
    case PostEvent::Kind::Send:
    case PostEvent::Kind::AsyncSend:
      return {PreOp::Kind::Send, post.channel, post.loc};
    case PostEvent::Kind::Recv:
      return {PreOp::Kind::Recv, post.channel, post.loc};
    case PostEvent::Kind::Select:
      return {PreOp::Kind::Default, "", post.loc};
    case PostEvent::Kind::Close:
      return {PreOp::Kind::Close, post.channel, post.loc};
  }
  return {};
}

bool offers(const PreEvent& pre, const PostEvent& post) {
  const PreOp op = committed_option(post);
  return std::find(pre.options.begin(), pre.options.end(), op) != pre.options.end();
}

void validate(const LocalTrace& lt) {
  auto fail = [&](std::size_t i, const std::string& msg) {
    throw InconsistentTrace("thread " + std::to_string(lt.tid) + ", event " + std::to_string(i) + ": " + msg);
  };
  for (std::size_t i = 0; i < lt.events.size(); ++i) {
    const bool want_pre = i % 2 == 0;
    if (want_pre) {
      const auto* pre = std::get_if<PreEvent>(&lt.events[i]);
      if (!pre) fail(i, "expected a pre event");
      if (pre->options.empty()) fail(i, "pre event without options");
      for (std::size_t a = 0; a < pre->options.size(); ++a) {
        if (pre->options[a].kind == PreOp::Kind::Default && a + 1 != pre->options.size())
          fail(i, "default option must come last");
        for (std::size_t b = a + 1; b < pre->options.size(); ++b)
          if (pre->options[a] == pre->options[b]) fail(i, "duplicate option");
      }
    } else {
      const auto* post = std::get_if<PostEvent>(&lt.events[i]);
      if (!post) fail(i, "expected a post event");
      if (!offers(std::get<PreEvent>(lt.events[i - 1]), *post)) fail(i, "post names an operation its pre did not offer");
    }
  }
}

void validate(const TraceSet& ts) {
  for (std::size_t i = 0; i < ts.threads.size(); ++i) {
    if (i && ts.threads[i - 1].tid >= ts.threads[i].tid)
      throw InconsistentTrace("thread ids must be distinct and ascending");
    validate(ts.threads[i]);
  }
}

namespace {

constexpr std::int64_t kRecvCode = 0;
constexpr std::int64_t kSendCode = 1;
constexpr std::int64_t kCloseCode = 2;
constexpr std::int64_t kDefaultCode = 3;
constexpr std::int64_t kPreTag = 0;
constexpr std::int64_t kPostTag = 1;
constexpr std::int64_t kAsyncTag = 2;

Value op_value(const Value& chan, std::int64_t code, std::optional<Tid> from, Loc loc, bool with_locations) {
  std::vector<Value> items{chan, Value::of(code)};
  if (from) items.push_back(Value::of(*from));
  if (with_locations) items.push_back(Value::of(loc));
  return Value::of_list(std::move(items));
}

Value chan_value(const std::string& channel) {
  return channel.empty() ? Value::of(0) : Value::of_name(channel);
}

Value encode_op(const PreOp& op, bool with_locations) {
  switch (op.kind) {
    case PreOp::Kind::Send:
      return op_value(chan_value(op.channel), kSendCode, std::nullopt, op.loc, with_locations);
    case PreOp::Kind::Recv:
      return op_value(chan_value(op.channel), kRecvCode, std::nullopt, op.loc, with_locations);
    case PreOp::Kind::Close:
      return op_value(chan_value(op.channel), kCloseCode, std::nullopt, op.loc, with_locations);
    case PreOp::Kind::Default:
      return op_value(Value::of(0), kDefaultCode, std::nullopt, op.loc, with_locations);
  }
  return {};
}

struct DecodedOp {
  PreOp op;
  std::optional<Tid> from;
};

DecodedOp decode_op(const Value& v, bool with_locations) {
  if (!v.is_list() || v.items.size() < 2) throw DecodeError("operation is not a list of at least two elements");
  const std::size_t base = with_locations ? 1 : 0;
  if (v.items.size() != 2 + base && v.items.size() != 3 + base) throw DecodeError("operation has wrong arity");
  const Value& code = v.items[1];
  if (!code.is_int()) throw DecodeError("operation code is not an integer");
  DecodedOp out;
  if (with_locations) {
    const Value& loc = v.items.back();
    if (!loc.is_int() || loc.integer < 0) throw DecodeError("location is not a non-negative integer");
    out.op.loc = static_cast<Loc>(loc.integer);
  }
  const bool has_from = v.items.size() == 3 + base;
  switch (code.integer) {
    case kSendCode: out.op.kind = PreOp::Kind::Send; break;
    case kRecvCode: out.op.kind = PreOp::Kind::Recv; break;
    case kCloseCode: out.op.kind = PreOp::Kind::Close; break;
    case kDefaultCode: out.op.kind = PreOp::Kind::Default; break;
    default: throw DecodeError("unknown operation code " + std::to_string(code.integer));
  }
  if (out.op.kind == PreOp::Kind::Default) {
    if (v.items[0] != Value::of(0)) throw DecodeError("default operation must carry 0 as channel");
  } else {
    if (v.items[0].kind != Value::Kind::Name) throw DecodeError("channel is not a name");
    out.op.channel = v.items[0].name;
  }
  if (has_from) {
    if (out.op.kind != PreOp::Kind::Recv) throw DecodeError("only receives carry a sender id");
    if (!v.items[2].is_int()) throw DecodeError("sender id is not an integer");
    out.from = v.items[2].integer;
  }
  return out;
}

}  // namespace

Value encode(const LocalEvent& ev, bool with_locations) {
  if (const auto* pre = std::get_if<PreEvent>(&ev)) {
    std::vector<Value> items{Value::of(kPreTag)};
    for (const PreOp& op : pre->options) items.push_back(encode_op(op, with_locations));
    return Value::of_list(std::move(items));
  }
  const auto& post = std::get<PostEvent>(ev);
  const PreOp op = committed_option(post);
  switch (post.kind) {
    case PostEvent::Kind::Recv:
      return Value::of_list({Value::of(kPostTag),
                             op_value(chan_value(op.channel), kRecvCode, post.partner, op.loc, with_locations)});
    case PostEvent::Kind::AsyncSend:
      return Value::of_list({Value::of(kAsyncTag), encode_op(op, with_locations), Value::of(post.partner)});
    default:
      return Value::of_list({Value::of(kPostTag), encode_op(op, with_locations)});
  }
}

LocalEvent decode(const Value& v, bool with_locations) {
  if (!v.is_list() || v.items.empty() || !v.items[0].is_int()) throw DecodeError("event is not a tagged list");
  const std::int64_t tag = v.items[0].integer;
  if (tag == kPreTag) {
    PreEvent pre;
    for (std::size_t i = 1; i < v.items.size(); ++i) {
      DecodedOp d = decode_op(v.items[i], with_locations);
      if (d.from) throw DecodeError("pre option carries a sender id");
      pre.options.push_back(std::move(d.op));
    }
    if (pre.options.empty()) throw DecodeError("pre event without options");
    return pre;
  }
  if (tag == kPostTag || tag == kAsyncTag) {
    const std::size_t want = tag == kPostTag ? 2 : 3;
    if (v.items.size() != want) throw DecodeError("post event has wrong arity");
    DecodedOp d = decode_op(v.items[1], with_locations);
    PostEvent post;
    post.channel = d.op.channel;
    post.loc = d.op.loc;
    if (tag == kAsyncTag) {
      if (d.op.kind != PreOp::Kind::Send || !v.items[2].is_int()) throw DecodeError("malformed asynchronous post");
      post.kind = PostEvent::Kind::AsyncSend;
      post.partner = v.items[2].integer;
      return post;
    }
    switch (d.op.kind) {
      case PreOp::Kind::Send: post.kind = PostEvent::Kind::Send; break;
      case PreOp::Kind::Close: post.kind = PostEvent::Kind::Close; break;
      case PreOp::Kind::Default: post.kind = PostEvent::Kind::Select; break;
      case PreOp::Kind::Recv:
        if (!d.from) throw DecodeError("receive post without sender id");
        post.kind = PostEvent::Kind::Recv;
        post.partner = *d.from;
        break;
    }
    if (d.from && d.op.kind != PreOp::Kind::Recv) throw DecodeError("unexpected sender id");
    return post;
  }
  throw DecodeError("unknown event tag " + std::to_string(tag));
}

TraceSet normalize_buffered(const TraceSet& ts) {
  TraceSet out;
  std::vector<LocalTrace> moved;
  std::set<Tid> seen;
  for (const LocalTrace& lt : ts.threads) seen.insert(lt.tid);
  for (const LocalTrace& lt : ts.threads) {
    LocalTrace kept{lt.tid, lt.is_virtual, {}};
    for (std::size_t i = 0; i < lt.events.size(); ++i) {
      const auto* post = i + 1 < lt.events.size() ? std::get_if<PostEvent>(&lt.events[i + 1]) : nullptr;
      if (post && post->kind == PostEvent::Kind::AsyncSend && std::holds_alternative<PreEvent>(lt.events[i])) {
        if (!seen.insert(post->partner).second)
          throw InconsistentTrace("duplicate virtual thread id " + std::to_string(post->partner));
        PostEvent plain = *post;
        plain.kind = PostEvent::Kind::Send;
        plain.partner = 0;
        moved.push_back(LocalTrace{post->partner, true, {lt.events[i], plain}});
        ++i;
        continue;
      }
      kept.events.push_back(lt.events[i]);
    }
    out.threads.push_back(std::move(kept));
  }
  for (LocalTrace& lt : moved) out.threads.push_back(std::move(lt));
  std::sort(out.threads.begin(), out.threads.end(),
            [](const LocalTrace& a, const LocalTrace& b) { return a.tid < b.tid; });
  return out;
}

}  // namespace prepost
