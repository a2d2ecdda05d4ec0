#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace prepost {

using Tid = std::int64_t;
using Loc = std::uint32_t;

inline constexpr Tid kMainTid = 1;
/// Sender id recorded for a receive on a closed channel. Never a real thread.
inline constexpr Tid kClosedSenderTid = 0;

struct Expr {
  enum class Kind { Var, Int, Hash, Head, Last, List, Tid, SendTag };

  Kind kind = Kind::Int;
  std::string name;         // Var, Hash
  std::int64_t value = 0;   // Int
  std::vector<Expr> items;  // Head/Last operand, List elements

  static Expr var(std::string n);
  static Expr integer(std::int64_t v);
  static Expr hash(std::string n);
  static Expr head(Expr e);
  static Expr last(Expr e);
  static Expr list(std::vector<Expr> elems);
  static Expr tid();
  // Instrumentation only: the sender id chosen when a tagged send commits.
  static Expr send_tag();

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Command;
using Program = std::vector<Command>;

struct CommOp {
  enum class Kind { Send, Recv };

  Kind kind = Kind::Send;
  std::string channel;
  Expr payload;        // Send
  std::string target;  // Recv; empty discards the value
  Loc loc = 0;
  // Set by the instrumenter: sends carry [tag, value], receives on a closed
  // channel yield [0, 0] so head/last projections still apply.
  bool tagged = false;

  friend bool operator==(const CommOp&, const CommOp&) = default;
};

struct Branch {
  CommOp op;
  Program body;

  friend bool operator==(const Branch& a, const Branch& b);
};

struct Command {
  enum class Kind {
    Assign,
    MakeChan,
    Go,
    Select,
    Close,
    // Instrumentation only; they name the running thread's log at run time.
    TraceInit,
    TraceAppend,
    TraceSendPost,
  };

  Kind kind = Kind::Assign;
  std::string target;  // Assign/MakeChan variable, Close/TraceSendPost channel
  Expr expr;           // Assign rhs, TraceAppend entry
  std::int64_t capacity = 0;
  Program body;  // Go
  std::vector<Branch> branches;
  std::optional<Program> default_body;
  Loc default_loc = 0;
  Loc loc = 0;  // Close, TraceSendPost

  static Command assign(std::string target, Expr rhs);
  static Command make_chan(std::string target, std::int64_t capacity = 0);
  static Command go(Program body);
  static Command select(std::vector<Branch> branches, std::optional<Program> default_body = std::nullopt,
                        Loc default_loc = 0);
  static Command send(std::string channel, Expr payload, Loc loc);
  static Command recv(std::string target, std::string channel, Loc loc);
  static Command close(std::string channel, Loc loc);

  friend bool operator==(const Command& a, const Command& b);
};

/// Runtime value. Names stand in for the hash of a variable.
struct Value {
  enum class Kind { Int, Name, List };

  Kind kind = Kind::Int;
  std::int64_t integer = 0;
  std::string name;
  std::vector<Value> items;

  static Value of(std::int64_t v);
  static Value of_name(std::string n);
  static Value of_list(std::vector<Value> items);

  bool is_int() const { return kind == Kind::Int; }
  bool is_list() const { return kind == Kind::List; }

  friend bool operator==(const Value&, const Value&) = default;
};

std::string to_string(const Value& v);

struct BufferedMessage {
  Value value;
  Tid sender = 0;  // virtual sender id
  Loc loc = 0;     // location of the buffered send

  friend bool operator==(const BufferedMessage&, const BufferedMessage&) = default;
};

struct ChanState {
  std::int64_t capacity = 0;
  std::deque<BufferedMessage> buffer;
  bool closed = false;

  friend bool operator==(const ChanState&, const ChanState&) = default;
};

using Storable = std::variant<Value, ChanState>;

/// Flat shared variable store. Later bindings override earlier ones.
class State {
 public:
  const Storable* find(std::string_view name) const;
  Storable* find(std::string_view name);

  const Value& value(std::string_view name) const;
  const ChanState& channel(std::string_view name) const;
  ChanState& channel(std::string_view name);

  /// Functional override: the returned state maps `name` to `s`.
  State override_with(const std::string& name, Storable s) const;
  void bind(const std::string& name, Storable s);

  const std::map<std::string, Storable, std::less<>>& bindings() const { return bindings_; }

  friend bool operator==(const State&, const State&) = default;

 private:
  std::map<std::string, Storable, std::less<>> bindings_;
};

/// Big-step expression evaluation in thread `tid`. Throws EvalError.
Value eval_expr(const State& state, Tid tid, const Expr& e);

/// Name of the reserved variable holding thread `tid`'s local trace.
std::string trace_var(Tid tid);
/// Name of the reserved variable holding the tag of `tid`'s last tagged send.
std::string send_tag_var(Tid tid);
bool is_reserved_name(std::string_view name);

/// Counts of communication sites, used to check location numbering.
struct SiteCounts {
  std::size_t comm_ops = 0;
  std::size_t closes = 0;
  std::size_t defaults = 0;
  Loc max_loc = 0;
};
SiteCounts count_sites(const Program& p);

}  // namespace prepost
