#include "prepost/instrument.hpp"

#include <map>

#include "prepost/errors.hpp"

namespace prepost {

namespace {

constexpr std::string_view kReceivedPrefix = "$rcv$";

void check_name(const std::string& n) {
  if (is_reserved_name(n)) throw ReservedNameError("name '" + n + "' is reserved for instrumentation");
}

void check_expr(const Expr& e) {
  if (e.kind == Expr::Kind::SendTag) throw ReservedNameError("program is already instrumented");
  check_name(e.name);
  for (const Expr& i : e.items) check_expr(i);
}

void check_program(const Program& p) {
  for (const Command& c : p) {
    if (is_instrumentation(c)) throw ReservedNameError("program is already instrumented");
    check_name(c.target);
    check_expr(c.expr);
    check_program(c.body);
    for (const Branch& b : c.branches) {
      if (b.op.tagged) throw ReservedNameError("program is already instrumented");
      check_name(b.op.channel);
      check_name(b.op.target);
      check_expr(b.op.payload);
      check_program(b.body);
    }
    if (c.default_body) check_program(*c.default_body);
  }
}

Expr literal(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return Expr::integer(v.integer);
    case Value::Kind::Name: return Expr::hash(v.name);
    case Value::Kind::List: {
      std::vector<Expr> items;
      for (const Value& i : v.items) items.push_back(literal(i));
      return Expr::list(std::move(items));
    }
  }
  return {};
}

Command append(Expr e) {
  Command c;
  c.kind = Command::Kind::TraceAppend;
  c.expr = std::move(e);
  return c;
}

Command trace_init() {
  Command c;
  c.kind = Command::Kind::TraceInit;
  return c;
}

PreOp pre_op(const CommOp& op) {
  return {op.kind == CommOp::Kind::Send ? PreOp::Kind::Send : PreOp::Kind::Recv, op.channel, op.loc};
}

Program instrument_program(const Program& p);

Command instrument_select(const Command& c, Program& out) {
  PreEvent pre;
  for (const Branch& b : c.branches) pre.options.push_back(pre_op(b.op));
  if (c.default_body) pre.options.push_back({PreOp::Kind::Default, "", c.default_loc});
  out.push_back(append(literal(encode(pre))));

  Command sel = c;
  for (Branch& b : sel.branches) {
    Program body;
    CommOp& op = b.op;
    op.tagged = true;
    if (op.kind == CommOp::Kind::Send) {
      op.payload = Expr::list({Expr::send_tag(), op.payload});
      Command post;
      post.kind = Command::Kind::TraceSendPost;
      post.target = op.channel;
      post.loc = op.loc;
      body.push_back(std::move(post));
    } else {
      const std::string fresh = received_var(op.loc);
      body.push_back(append(Expr::list(
          {Expr::integer(1),
           Expr::list({Expr::hash(op.channel), Expr::integer(0), Expr::head(Expr::var(fresh)), Expr::integer(op.loc)})})));
      if (!op.target.empty()) body.push_back(Command::assign(op.target, Expr::last(Expr::var(fresh))));
      op.target = fresh;
    }
    for (Command& k : instrument_program(b.body)) body.push_back(std::move(k));
    b.body = std::move(body);
  }
  if (sel.default_body) {
    Program body;
    body.push_back(append(literal(encode(PostEvent{PostEvent::Kind::Select, "", c.default_loc, 0}))));
    for (Command& k : instrument_program(*c.default_body)) body.push_back(std::move(k));
    sel.default_body = std::move(body);
  }
  return sel;
}

Program instrument_program(const Program& p) {
  Program out;
  for (const Command& c : p) {
    switch (c.kind) {
      case Command::Kind::Select:
        out.push_back(instrument_select(c, out));
        break;
      case Command::Kind::Close:
        out.push_back(append(literal(encode(PreEvent{{{PreOp::Kind::Close, c.target, c.loc}}}))));
        out.push_back(c);
        out.push_back(append(literal(encode(PostEvent{PostEvent::Kind::Close, c.target, c.loc, 0}))));
        break;
      case Command::Kind::Go: {
        Command g = c;
        g.body = instrument_program(c.body);
        g.body.insert(g.body.begin(), trace_init());
        out.push_back(std::move(g));
        break;
      }
      default:
        out.push_back(c);
        break;
    }
  }
  return out;
}

bool is_projection(const Command& c, const std::string& fresh) {
  return c.kind == Command::Kind::Assign && c.expr.kind == Expr::Kind::Last && c.expr.items.size() == 1 &&
         c.expr.items[0].kind == Expr::Kind::Var && c.expr.items[0].name == fresh;
}

Program erase_program(const Program& p) {
  Program out;
  for (const Command& c : p) {
    if (is_instrumentation(c)) continue;
    Command k = c;
    k.body = erase_program(c.body);
    for (Branch& b : k.branches) {
      CommOp& op = b.op;
      Program body = b.body;
      if (op.tagged && op.kind == CommOp::Kind::Send) {
        op.payload = op.payload.items.at(1);
      } else if (op.tagged) {
        const std::string fresh = op.target;
        op.target.clear();
        auto it = body.begin();
        while (it != body.end() && is_instrumentation(*it)) ++it;
        if (it != body.end() && is_projection(*it, fresh)) {
          op.target = it->target;
          body.erase(it);
        }
      }
      op.tagged = false;
      b.body = erase_program(body);
    }
    if (k.default_body) k.default_body = erase_program(*k.default_body);
    out.push_back(std::move(k));
  }
  return out;
}

std::map<Tid, Tid> virtual_renumbering(const RunResult& r) {
  std::map<Tid, Tid> m;
  Tid next = r.thread_count + 1;
  for (Tid raw : r.virtual_ids) m.emplace(raw, next++);
  return m;
}

Tid renumber(const std::map<Tid, Tid>& m, Tid t) {
  auto it = m.find(t);
  return it == m.end() ? t : it->second;
}

}  // namespace

std::string received_var(Loc loc) { return std::string(kReceivedPrefix) + std::to_string(loc); }

bool is_instrumentation(const Command& c) {
  return c.kind == Command::Kind::TraceInit || c.kind == Command::Kind::TraceAppend ||
         c.kind == Command::Kind::TraceSendPost;
}

InstrumentedProgram instrument(const Program& p) {
  check_program(p);
  InstrumentedProgram ip;
  ip.program = instrument_program(p);
  ip.program.insert(ip.program.begin(), trace_init());
  return ip;
}

Program erase(const InstrumentedProgram& ip) { return erase_program(ip.program); }

TraceSet collect_local_traces(const RunResult& result) {
  const auto ids = virtual_renumbering(result);
  TraceSet ts;
  for (Tid tid = 1; tid <= result.thread_count; ++tid) {
    LocalTrace lt{tid, false, {}};
    const Storable* s = result.final_state.find(trace_var(tid));
    const Value* log = s ? std::get_if<Value>(s) : nullptr;
    if (log) {
      if (!log->is_list()) throw DecodeError("thread " + std::to_string(tid) + ": log is not a list");
      for (std::size_t i = 0; i < log->items.size(); ++i) {
        LocalEvent ev;
        try {
          ev = decode(log->items[i]);
        } catch (const DecodeError& e) {
          throw DecodeError("thread " + std::to_string(tid) + ", entry " + std::to_string(i) + ": " + e.what());
        }
        if (auto* post = std::get_if<PostEvent>(&ev);
            post && (post->kind == PostEvent::Kind::AsyncSend || post->kind == PostEvent::Kind::Recv))
          post->partner = renumber(ids, post->partner);
        lt.events.push_back(std::move(ev));
      }
    }
    ts.threads.push_back(std::move(lt));
  }
  return ts;
}

RunTimeTrace actual_trace(const RunResult& result) {
  const auto ids = virtual_renumbering(result);
  RunTimeTrace t = result.trace;
  for (TraceEvent& e : t) {
    e.tid = renumber(ids, e.tid);
    e.from = renumber(ids, e.from);
  }
  return t;
}

Recording record_with(const Program& p, const Scheduler& scheduler, std::size_t max_steps) {
  Recording rec;
  rec.result = run_with(instrument(p).program, scheduler, max_steps);
  rec.raw = collect_local_traces(rec.result);
  rec.traces = normalize_buffered(rec.raw);
  rec.actual = actual_trace(rec.result);
  return rec;
}

Recording record(const Program& p, std::uint64_t seed, std::size_t max_steps) {
  Recording rec;
  rec.result = run(instrument(p).program, seed, max_steps);
  rec.raw = collect_local_traces(rec.result);
  rec.traces = normalize_buffered(rec.raw);
  rec.actual = actual_trace(rec.result);
  return rec;
}

}  // namespace prepost
