#include "prepost/program.hpp"

#include <limits>
#include <sstream>

#include "prepost/errors.hpp"

namespace prepost {

Expr Expr::var(std::string n) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(n);
  return e;
}

Expr Expr::integer(std::int64_t v) {
  Expr e;
  e.kind = Kind::Int;
  e.value = v;
  return e;
}

Expr Expr::hash(std::string n) {
  Expr e;
  e.kind = Kind::Hash;
  e.name = std::move(n);
  return e;
}

Expr Expr::head(Expr inner) {
  Expr e;
  e.kind = Kind::Head;
  e.items.push_back(std::move(inner));
  return e;
}

Expr Expr::last(Expr inner) {
  Expr e;
  e.kind = Kind::Last;
  e.items.push_back(std::move(inner));
  return e;
}

Expr Expr::list(std::vector<Expr> elems) {
  Expr e;
  e.kind = Kind::List;
  e.items = std::move(elems);
  return e;
}

Expr Expr::tid() {
  Expr e;
  e.kind = Kind::Tid;
  return e;
}

Expr Expr::send_tag() {
  Expr e;
  e.kind = Kind::SendTag;
  return e;
}

bool operator==(const Branch& a, const Branch& b) { return a.op == b.op && a.body == b.body; }

bool operator==(const Command& a, const Command& b) {
  return a.kind == b.kind && a.target == b.target && a.expr == b.expr && a.capacity == b.capacity &&
         a.body == b.body && a.branches == b.branches && a.default_body == b.default_body &&
         a.default_loc == b.default_loc && a.loc == b.loc;
}

Command Command::assign(std::string target, Expr rhs) {
  Command c;
  c.kind = Kind::Assign;
  c.target = std::move(target);
  c.expr = std::move(rhs);
  return c;
}

Command Command::make_chan(std::string target, std::int64_t capacity) {
  Command c;
  c.kind = Kind::MakeChan;
  c.target = std::move(target);
  c.capacity = capacity;
  return c;
}

Command Command::go(Program body) {
  Command c;
  c.kind = Kind::Go;
  c.body = std::move(body);
  return c;
}

Command Command::select(std::vector<Branch> branches, std::optional<Program> default_body, Loc default_loc) {
  Command c;
  c.kind = Kind::Select;
  c.branches = std::move(branches);
  c.default_body = std::move(default_body);
  c.default_loc = default_loc;
  return c;
}

Command Command::send(std::string channel, Expr payload, Loc loc) {
  CommOp op;
  op.kind = CommOp::Kind::Send;
  op.channel = std::move(channel);
  op.payload = std::move(payload);
  op.loc = loc;
  return select({Branch{std::move(op), {}}});
}

Command Command::recv(std::string target, std::string channel, Loc loc) {
  CommOp op;
  op.kind = CommOp::Kind::Recv;
  op.channel = std::move(channel);
  op.target = std::move(target);
  op.loc = loc;
  return select({Branch{std::move(op), {}}});
}

Command Command::close(std::string channel, Loc loc) {
  Command c;
  c.kind = Kind::Close;
  c.target = std::move(channel);
  c.loc = loc;
  return c;
}

Value Value::of(std::int64_t v) {
  Value r;
  r.kind = Kind::Int;
  r.integer = v;
  return r;
}

Value Value::of_name(std::string n) {
  Value r;
  r.kind = Kind::Name;
  r.name = std::move(n);
  return r;
}

Value Value::of_list(std::vector<Value> items) {
  Value r;
  r.kind = Kind::List;
  r.items = std::move(items);
  return r;
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int:
      return std::to_string(v.integer);
    case Value::Kind::Name:
      return "#" + v.name;
    case Value::Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i) out += ",";
        out += to_string(v.items[i]);
      }
      return out + "]";
    }
  }
  return {};
}

const Storable* State::find(std::string_view name) const {
  auto it = bindings_.find(name);
  return it == bindings_.end() ? nullptr : &it->second;
}

Storable* State::find(std::string_view name) {
  auto it = bindings_.find(name);
  return it == bindings_.end() ? nullptr : &it->second;
}

const Value& State::value(std::string_view name) const {
  const Storable* s = find(name);
  if (!s) throw EvalError("unbound variable '" + std::string(name) + "'");
  if (const auto* v = std::get_if<Value>(s)) return *v;
  throw EvalError("channel '" + std::string(name) + "' used as a value");
}

const ChanState& State::channel(std::string_view name) const {
  const Storable* s = find(name);
  if (!s) throw EvalError("unbound channel '" + std::string(name) + "'");
  if (const auto* c = std::get_if<ChanState>(s)) return *c;
  throw EvalError("'" + std::string(name) + "' is not a channel");
}

ChanState& State::channel(std::string_view name) {
  return const_cast<ChanState&>(static_cast<const State&>(*this).channel(name));
}

State State::override_with(const std::string& name, Storable s) const {
  State out = *this;
  out.bind(name, std::move(s));
  return out;
}

void State::bind(const std::string& name, Storable s) { bindings_.insert_or_assign(name, std::move(s)); }

Value eval_expr(const State& state, Tid tid, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return state.value(e.name);
    case Expr::Kind::Int:
      return Value::of(e.value);
    case Expr::Kind::Hash:
      return Value::of_name(e.name);
    case Expr::Kind::Tid:
      return Value::of(tid);
    case Expr::Kind::SendTag:
      return state.value(send_tag_var(tid));
    case Expr::Kind::List: {
      std::vector<Value> items;
      items.reserve(e.items.size());
      for (const Expr& sub : e.items) items.push_back(eval_expr(state, tid, sub));
      return Value::of_list(std::move(items));
    }
    case Expr::Kind::Head:
    case Expr::Kind::Last: {
      Value inner = eval_expr(state, tid, e.items.at(0));
      const char* op = e.kind == Expr::Kind::Head ? "head" : "last";
      if (!inner.is_list()) throw EvalError(std::string(op) + " of a non-list value " + to_string(inner));
      if (inner.items.empty()) throw EvalError(std::string(op) + " of an empty list");
      return e.kind == Expr::Kind::Head ? inner.items.front() : inner.items.back();
    }
  }
  throw EvalError("unknown expression kind");
}

std::string trace_var(Tid tid) { return "$trace$" + std::to_string(tid); }

std::string send_tag_var(Tid tid) { return "$tag$" + std::to_string(tid); }

bool is_reserved_name(std::string_view name) { return !name.empty() && name.front() == '$'; }

namespace {

void count_into(const Program& p, SiteCounts& out) {
  for (const Command& c : p) {
    switch (c.kind) {
      case Command::Kind::Go:
        count_into(c.body, out);
        break;
      case Command::Kind::Close:
        ++out.closes;
        out.max_loc = std::max(out.max_loc, c.loc);
        break;
      case Command::Kind::Select:
        for (const Branch& b : c.branches) {
          ++out.comm_ops;
          out.max_loc = std::max(out.max_loc, b.op.loc);
          count_into(b.body, out);
        }
        if (c.default_body) {
          ++out.defaults;
          out.max_loc = std::max(out.max_loc, c.default_loc);
          count_into(*c.default_body, out);
        }
        break;
      default:
        break;
    }
  }
}

}  // namespace

SiteCounts count_sites(const Program& p) {
  SiteCounts out;
  count_into(p, out);
  return out;
}

}  // namespace prepost
