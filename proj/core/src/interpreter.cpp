#include "prepost/interpreter.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "prepost/trace.hpp"

namespace prepost {

std::string to_string(const TraceEvent& e) {
  switch (e.kind) {
    case TraceEvent::Kind::Send:
      return std::to_string(e.tid) + "!" + e.channel;
    case TraceEvent::Kind::Recv:
      return std::to_string(e.tid) + "?<" + std::to_string(e.from) + "," + e.channel + ">";
    case TraceEvent::Kind::Default:
      return std::to_string(e.tid) + ":sel";
    case TraceEvent::Kind::Close:
      return std::to_string(e.tid) + ":close " + e.channel;
  }
  return {};
}

std::string to_string(const RunTimeTrace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += "; ";
    out += to_string(t[i]);
  }
  return out;
}

bool same_actions(const RunTimeTrace& a, const RunTimeTrace& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(),
                                            [](const TraceEvent& x, const TraceEvent& y) { return x.same_action(y); });
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "COMPLETED";
    case RunStatus::Deadlock: return "DEADLOCK";
    case RunStatus::StepLimit: return "STEP_LIMIT";
    case RunStatus::Crashed: return "CRASHED";
  }
  return {};
}

namespace {

bool is_log_command(const Command& c) {
  return c.kind == Command::Kind::TraceInit || c.kind == Command::Kind::TraceAppend ||
         c.kind == Command::Kind::TraceSendPost ||
         (c.kind == Command::Kind::Assign && c.expr.kind == Expr::Kind::Last && c.expr.items.size() == 1 &&
          is_reserved_name(c.expr.items[0].name));
}

void push_program(ThreadState& t, const Program& p) {
  for (auto it = p.rbegin(); it != p.rend(); ++it) t.stack.push_back(&*it);
}

const Command* head(const ThreadState& t) { return !t.started || t.stack.empty() ? nullptr : t.stack.back(); }

void commit_branch(ThreadState& t, const Program& body) {
  t.stack.pop_back();
  push_program(t, body);
}

void append_trace(State& state, Tid tid, Value entry) {
  Storable* s = state.find(trace_var(tid));
  Value* log = s ? std::get_if<Value>(s) : nullptr;
  if (!log || !log->is_list()) throw EvalError("trace of thread " + std::to_string(tid) + " is not initialised");
  log->items.push_back(std::move(entry));
}

Value eval_payload(Config& cfg, const ThreadState& t, const CommOp& op, Tid tag) {
  if (op.tagged) cfg.state.bind(send_tag_var(t.tid), Value::of(tag));
  return eval_expr(cfg.state, t.tid, op.payload);
}

void bind_received(Config& cfg, const CommOp& op, Value v) {
  if (!op.target.empty()) cfg.state.bind(op.target, std::move(v));
}

TraceEvent make_event(TraceEvent::Kind k, Tid tid, Tid from, const std::string& ch, Loc loc, Loc partner_loc) {
  TraceEvent e;
  e.kind = k;
  e.tid = tid;
  e.from = from;
  e.channel = ch;
  e.loc = loc;
  e.partner_loc = partner_loc;
  return e;
}

}  // namespace

Config initial_config(std::shared_ptr<const Program> program) {
  Config cfg;
  cfg.program = std::move(program);
  ThreadState main;
  main.tid = kMainTid;
  push_program(main, *cfg.program);
  cfg.threads.push_back(std::move(main));
  return cfg;
}

bool main_finished(const Config& cfg) {
  return cfg.threads.empty() || cfg.threads.front().tid != kMainTid || cfg.threads.front().stack.empty();
}

std::vector<StepChoice> enabled_steps(const Config& cfg) {
  using K = StepChoice::Kind;
  // Synchronous receivers waiting per channel.
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>, std::less<>> receivers;
  for (std::size_t t = 0; t < cfg.threads.size(); ++t) {
    const Command* c = head(cfg.threads[t]);
    if (!c || c->kind != Command::Kind::Select) continue;
    for (std::size_t b = 0; b < c->branches.size(); ++b) {
      const CommOp& op = c->branches[b].op;
      if (op.kind != CommOp::Kind::Recv) continue;
      const ChanState& ch = cfg.state.channel(op.channel);
      if (ch.capacity == 0 && !ch.closed) receivers[op.channel].push_back({t, b});
    }
  }
  std::vector<bool> recv_ready(cfg.threads.size(), false);
  for (const auto& [name, list] : receivers) {
    const auto& ch = name;
    for (const auto& [rt, rb] : list) {
      for (std::size_t t = 0; t < cfg.threads.size() && !recv_ready[rt]; ++t) {
        const Command* c = head(cfg.threads[t]);
        if (t == rt || !c || c->kind != Command::Kind::Select) continue;
        for (const Branch& br : c->branches)
          if (br.op.kind == CommOp::Kind::Send && br.op.channel == ch) recv_ready[rt] = true;
      }
    }
  }

  std::vector<StepChoice> out;
  for (std::size_t t = 0; t < cfg.threads.size(); ++t) {
    const ThreadState& th = cfg.threads[t];
    if (!th.started) {
      out.push_back({K::Start, t});
      continue;
    }
    const Command* c = head(th);
    if (!c) {
      if (th.tid != kMainTid) out.push_back({K::Terminate, t});
      continue;
    }
    if (c->kind != Command::Kind::Select) {
      out.push_back({K::Local, t});
      continue;
    }
    bool ready = recv_ready[t];
    for (std::size_t b = 0; b < c->branches.size(); ++b) {
      const CommOp& op = c->branches[b].op;
      const ChanState& ch = cfg.state.channel(op.channel);
      if (op.kind == CommOp::Kind::Send) {
        if (ch.closed) {
          out.push_back({K::CrashSend, t, b});
          ready = true;
        } else if (ch.capacity > 0) {
          if (static_cast<std::int64_t>(ch.buffer.size()) < ch.capacity) {
            out.push_back({K::BufferedSend, t, b});
            ready = true;
          }
        } else if (auto it = receivers.find(op.channel); it != receivers.end()) {
          for (const auto& [rt, rb] : it->second) {
            if (rt == t) continue;
            out.push_back({K::Sync, t, b, rt, rb});
            ready = true;
          }
        }
      } else if (!ch.buffer.empty()) {
        out.push_back({K::BufferedRecv, t, b});
        ready = true;
      } else if (ch.closed) {
        out.push_back({K::RecvClosed, t, b});
        ready = true;
      }
    }
    if (c->default_body && !ready) out.push_back({K::Default, t});
  }
  return out;
}

RunTimeTrace apply_step(Config& cfg, const StepChoice& choice) {
  using K = StepChoice::Kind;
  RunTimeTrace events;
  ThreadState& th = cfg.threads.at(choice.thread);
  const Tid tid = th.tid;
  switch (choice.kind) {
    case K::Start:
      th.started = true;
      return events;
    case K::Terminate:
      cfg.threads.erase(cfg.threads.begin() + static_cast<std::ptrdiff_t>(choice.thread));
      return events;
    case K::Local: {
      const Command& c = *th.stack.back();
      th.stack.pop_back();
      switch (c.kind) {
        case Command::Kind::Assign:
          cfg.state.bind(c.target, eval_expr(cfg.state, tid, c.expr));
          break;
        case Command::Kind::MakeChan:
          cfg.state.bind(c.target, ChanState{c.capacity, {}, false});
          break;
        case Command::Kind::Go: {
          ThreadState child;
          child.tid = cfg.next_tid++;
          child.started = false;
          push_program(child, c.body);
          cfg.threads.push_back(std::move(child));
          break;
        }
        case Command::Kind::Close: {
          ChanState& ch = cfg.state.channel(c.target);
          if (ch.closed) throw ChannelCrash("close of closed channel '" + c.target + "'");
          ch.closed = true;
          events.push_back(make_event(TraceEvent::Kind::Close, tid, 0, c.target, c.loc, 0));
          break;
        }
        case Command::Kind::TraceInit:
          cfg.state.bind(trace_var(tid), Value::of_list({}));
          break;
        case Command::Kind::TraceAppend:
          append_trace(cfg.state, tid, eval_expr(cfg.state, tid, c.expr));
          break;
        case Command::Kind::TraceSendPost: {
          const Value& tag = cfg.state.value(send_tag_var(tid));
          PostEvent post{PostEvent::Kind::Send, c.target, c.loc, 0};
          if (tag.integer != tid) {
            post.kind = PostEvent::Kind::AsyncSend;
            post.partner = tag.integer;
          }
          append_trace(cfg.state, tid, encode(post, true));
          break;
        }
        case Command::Kind::Select:
          throw EvalError("select scheduled as a local step");
      }
      return events;
    }
    case K::Sync: {
      ThreadState& rx = cfg.threads.at(choice.partner);
      const Command& sc = *th.stack.back();
      const Command& rc = *rx.stack.back();
      const CommOp& sop = sc.branches.at(choice.branch).op;
      const CommOp& rop = rc.branches.at(choice.partner_branch).op;
      Value v = eval_payload(cfg, th, sop, tid);
      bind_received(cfg, rop, std::move(v));
      events.push_back(make_event(TraceEvent::Kind::Send, tid, 0, sop.channel, sop.loc, rop.loc));
      events.push_back(make_event(TraceEvent::Kind::Recv, rx.tid, tid, rop.channel, rop.loc, sop.loc));
      commit_branch(th, sc.branches[choice.branch].body);
      commit_branch(rx, rc.branches[choice.partner_branch].body);
      return events;
    }
    case K::BufferedSend: {
      const Command& sc = *th.stack.back();
      const CommOp& op = sc.branches.at(choice.branch).op;
      const Tid vtid = cfg.next_virtual++;
      Value v = eval_payload(cfg, th, op, vtid);
      cfg.state.channel(op.channel).buffer.push_back(BufferedMessage{std::move(v), vtid, op.loc});
      commit_branch(th, sc.branches[choice.branch].body);
      return events;
    }
    case K::BufferedRecv: {
      const Command& rc = *th.stack.back();
      const CommOp& op = rc.branches.at(choice.branch).op;
      ChanState& ch = cfg.state.channel(op.channel);
      BufferedMessage msg = std::move(ch.buffer.front());
      ch.buffer.pop_front();
      events.push_back(make_event(TraceEvent::Kind::Send, msg.sender, 0, op.channel, msg.loc, op.loc));
      events.push_back(make_event(TraceEvent::Kind::Recv, tid, msg.sender, op.channel, op.loc, msg.loc));
      bind_received(cfg, op, std::move(msg.value));
      commit_branch(th, rc.branches[choice.branch].body);
      return events;
    }
    case K::RecvClosed: {
      const Command& rc = *th.stack.back();
      const CommOp& op = rc.branches.at(choice.branch).op;
      bind_received(cfg, op, op.tagged ? Value::of_list({Value::of(0), Value::of(0)}) : Value::of(0));
      events.push_back(make_event(TraceEvent::Kind::Recv, tid, kClosedSenderTid, op.channel, op.loc, 0));
      commit_branch(th, rc.branches[choice.branch].body);
      return events;
    }
    case K::Default: {
      const Command& c = *th.stack.back();
      events.push_back(make_event(TraceEvent::Kind::Default, tid, 0, "", c.default_loc, 0));
      commit_branch(th, *c.default_body);
      return events;
    }
    case K::CrashSend: {
      const CommOp& op = th.stack.back()->branches.at(choice.branch).op;
      throw ChannelCrash("send on closed channel '" + op.channel + "' in thread " + std::to_string(tid));
    }
  }
  return events;
}

std::pair<Config, RunTimeTrace> step(const Config& cfg, const StepChoice& choice) {
  Config next = cfg;
  RunTimeTrace events = apply_step(next, choice);
  return {std::move(next), std::move(events)};
}

StepSignature signature(const Config& cfg, const StepChoice& choice) {
  using K = StepChoice::Kind;
  const ThreadState& th = cfg.threads.at(choice.thread);
  StepSignature s;
  s.kind = choice.kind;
  s.tid = th.tid;
  const Command* c = head(th);
  if (!c) return s;
  switch (choice.kind) {
    case K::Local:
      s.loc = c->loc;
      s.instrumentation = is_log_command(*c);
      break;
    case K::Sync: {
      const ThreadState& rx = cfg.threads.at(choice.partner);
      s.partner = rx.tid;
      s.loc = c->branches.at(choice.branch).op.loc;
      s.partner_loc = rx.stack.back()->branches.at(choice.partner_branch).op.loc;
      break;
    }
    case K::Default:
      s.loc = c->default_loc;
      break;
    case K::Start:
    case K::Terminate:
      break;
    default:
      s.loc = c->branches.at(choice.branch).op.loc;
      break;
  }
  return s;
}

std::string config_key(const Config& cfg) {
  std::ostringstream os;
  os << cfg.next_tid << '/' << cfg.next_virtual << '|';
  for (const ThreadState& t : cfg.threads) {
    os << t.tid << (t.started ? ':' : '*');
    for (const Command* c : t.stack) os << static_cast<const void*>(c) << ',';
    os << ';';
  }
  for (const auto& [name, s] : cfg.state.bindings()) {
    if (const auto* ch = std::get_if<ChanState>(&s)) {
      os << name << (ch->closed ? "#c" : "#o");
      for (const BufferedMessage& m : ch->buffer) os << m.sender << '@' << m.loc << ',';
      os << ';';
    }
  }
  return os.str();
}

namespace {

// Runs log commands sitting at thread heads so that every committed
// operation has its post recorded. Never communicates.
void flush_logs(Config& cfg, RunResult& r) {
  for (std::size_t t = 0; t < cfg.threads.size(); ++t) {
    while (cfg.threads[t].started && !cfg.threads[t].stack.empty() && is_log_command(*cfg.threads[t].stack.back())) {
      const StepChoice local{StepChoice::Kind::Local, t};
      r.schedule.push_back(signature(cfg, local));
      apply_step(cfg, local);
    }
  }
}

}  // namespace

RunResult run_with(const Program& prog, const Scheduler& scheduler, std::size_t max_steps) {
  RunResult r;
  Config cfg = initial_config(std::make_shared<const Program>(prog));
  auto finish = [&](RunStatus s) {
    if (s != RunStatus::Deadlock) flush_logs(cfg, r);
    r.status = s;
    r.thread_count = cfg.next_tid - 1;
    r.final_state = std::move(cfg.state);
    return r;
  };
  for (;;) {
    if (main_finished(cfg)) return finish(RunStatus::Completed);
    if (r.steps >= max_steps) return finish(RunStatus::StepLimit);
    std::vector<StepChoice> choices;
    try {
      choices = enabled_steps(cfg);
    } catch (const Error& e) {
      r.diagnostic = e.what();
      return finish(RunStatus::Crashed);
    }
    if (choices.empty()) return finish(RunStatus::Deadlock);
    const std::size_t pick = scheduler(cfg, choices);
    const StepChoice& choice = choices.at(pick);
    r.schedule.push_back(signature(cfg, choice));
    const Tid virtual_before = cfg.next_virtual;
    try {
      RunTimeTrace events = apply_step(cfg, choice);
      r.trace.insert(r.trace.end(), events.begin(), events.end());
    } catch (const Error& e) {
      r.diagnostic = e.what();
      ++r.steps;
      return finish(RunStatus::Crashed);
    }
    for (Tid v = virtual_before; v < cfg.next_virtual; ++v) r.virtual_ids.push_back(v);
    ++r.steps;
  }
}

RunResult run(const Program& prog, std::uint64_t seed, std::size_t max_steps) {
  std::mt19937_64 rng(seed);
  RunResult r = run_with(
      prog,
      [&rng](const Config&, const std::vector<StepChoice>& choices) {
        return static_cast<std::size_t>(std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng));
      },
      max_steps);
  r.seed = seed;
  return r;
}

}  // namespace prepost
