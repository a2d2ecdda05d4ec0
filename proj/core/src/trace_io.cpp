#include "prepost/trace_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "prepost/errors.hpp"

namespace prepost {

namespace {

std::string format_op(const PreOp& op) {
  const std::string at = "@" + std::to_string(op.loc);
  switch (op.kind) {
    case PreOp::Kind::Send: return op.channel + "!" + at;
    case PreOp::Kind::Recv: return op.channel + "?" + at;
    case PreOp::Kind::Close: return "close " + op.channel + at;
    case PreOp::Kind::Default: return "sel" + at;
  }
  return {};
}

struct LineParser {
  std::string_view text;
  std::size_t line;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw TraceFormatError(msg, line); }

  bool at_end() const { return pos >= text.size(); }
  bool peek(std::string_view s) const { return text.substr(pos, s.size()) == s; }
  bool accept(std::string_view s) {
    if (!peek(s)) return false;
    pos += s.size();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }

  std::int64_t number() {
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc{} || end == text.data() + pos) fail("expected a number");
    pos = static_cast<std::size_t>(end - text.data());
    return v;
  }

  Loc loc() {
    expect("@");
    const std::int64_t v = number();
    if (v < 0) fail("negative location");
    return static_cast<Loc>(v);
  }

  std::string ident() {
    const std::size_t start = pos;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
    if (start == pos || std::isdigit(static_cast<unsigned char>(text[start]))) fail("expected a channel name");
    return std::string(text.substr(start, pos - start));
  }

  PreOp pre_op() {
    if (accept("close ")) {
      std::string ch = ident();
      return {PreOp::Kind::Close, ch, loc()};
    }
    if (peek("sel@")) {
      pos += 3;
      return {PreOp::Kind::Default, "", loc()};
    }
    std::string ch = ident();
    if (accept("!")) return {PreOp::Kind::Send, ch, loc()};
    if (accept("?")) return {PreOp::Kind::Recv, ch, loc()};
    fail("expected '!' or '?'");
  }

  LocalEvent event() {
    if (accept("pre(")) {
      PreEvent pre;
      do pre.options.push_back(pre_op());
      while (accept("|"));
      expect(")");
      return pre;
    }
    if (accept("postA(")) {
      PostEvent post;
      post.kind = PostEvent::Kind::AsyncSend;
      post.channel = ident();
      expect("!");
      post.loc = loc();
      expect("~");
      post.partner = number();
      expect(")");
      return post;
    }
    expect("post(");
    PostEvent post;
    if (!at_end() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      post.kind = PostEvent::Kind::Recv;
      post.partner = number();
      expect("#");
      post.channel = ident();
      expect("?");
      post.loc = loc();
    } else {
      const PreOp op = pre_op();
      switch (op.kind) {
        case PreOp::Kind::Send: post.kind = PostEvent::Kind::Send; break;
        case PreOp::Kind::Close: post.kind = PostEvent::Kind::Close; break;
        case PreOp::Kind::Default: post.kind = PostEvent::Kind::Select; break;
        case PreOp::Kind::Recv: fail("receive post must name its sender");
      }
      post.channel = op.channel;
      post.loc = op.loc;
    }
    expect(")");
    return post;
  }
};

}  // namespace

std::string format_event(const LocalEvent& ev) {
  if (const auto* pre = std::get_if<PreEvent>(&ev)) {
    std::string out = "pre(";
    for (std::size_t i = 0; i < pre->options.size(); ++i) {
      if (i) out += "|";
      out += format_op(pre->options[i]);
    }
    return out + ")";
  }
  const auto& post = std::get<PostEvent>(ev);
  const std::string at = "@" + std::to_string(post.loc);
  switch (post.kind) {
    case PostEvent::Kind::Recv:
      return "post(" + std::to_string(post.partner) + "#" + post.channel + "?" + at + ")";
    case PostEvent::Kind::AsyncSend:
      return "postA(" + post.channel + "!" + at + "~" + std::to_string(post.partner) + ")";
    default:
      return "post(" + format_op(committed_option(post)) + ")";
  }
}

std::string format_trace_set(const TraceSet& ts) {
  std::string out;
  for (const LocalTrace& lt : ts.threads) {
    out += (lt.is_virtual ? "V" : "T") + std::to_string(lt.tid) + ":";
    for (std::size_t i = 0; i < lt.events.size(); ++i) out += (i ? "; " : " ") + format_event(lt.events[i]);
    out += "\n";
  }
  return out;
}

TraceSet parse_trace_set(std::string_view text) {
  TraceSet ts;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.substr(0, 2) == "//") {
      if (end == text.size()) break;
      continue;
    }
    LineParser p{line, line_no};
    LocalTrace lt;
    if (p.accept("V")) lt.is_virtual = true;
    else p.expect("T");
    lt.tid = p.number();
    if (lt.tid <= 0) p.fail("thread id must be positive");
    p.expect(":");
    if (!p.at_end()) {
      p.expect(" ");
      do lt.events.push_back(p.event());
      while (p.accept("; "));
      if (!p.at_end()) p.fail("unexpected trailing text");
    }
    try {
      validate(lt);
    } catch (const InconsistentTrace& e) {
      p.fail(e.what());
    }
    if (!ts.threads.empty() && ts.threads.back().tid >= lt.tid) p.fail("thread ids must be distinct and ascending");
    ts.threads.push_back(std::move(lt));
    if (end == text.size()) break;
  }
  return ts;
}

void write_trace_file(const TraceSet& ts, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << format_trace_set(ts);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

TraceSet read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace_set(buf.str());
}

}  // namespace prepost
