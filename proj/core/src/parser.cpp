#include "prepost/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "prepost/errors.hpp"

namespace prepost {
namespace {

enum class Tok { Ident, Int, Define, Arrow, LBrace, RBrace, LParen, RParen, LBracket, RBracket, Comma, Sep, Colon, Hash, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {"go",   "select", "case", "default", "close",
                                                      "makeChan", "head", "last", "tid", "cap"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto push = [&](Tok k, std::string text, std::size_t len) {
    out.push_back(Token{k, std::move(text), 0, line, col});
    i += len;
    col += len;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      out.push_back(Token{Tok::Sep, "\\n", 0, line, col});
      ++i;
      ++line;
      col = 1;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
    } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, std::string(src.substr(i, j - i)), j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Int, std::string(src.substr(i, j - i)), 0, line, col};
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, t.value);
      if (ec != std::errc{} || p != src.data() + j) throw ParseError("integer literal out of range", line, col);
      out.push_back(std::move(t));
      col += j - i;
      i = j;
    } else if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') {
      push(Tok::Define, ":=", 2);
    } else if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') {
      push(Tok::Arrow, "<-", 2);
    } else {
      Tok k;
      switch (c) {
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBracket; break;
        case ']': k = Tok::RBracket; break;
        case ',': k = Tok::Comma; break;
        case ';': k = Tok::Sep; break;
        case ':': k = Tok::Colon; break;
        case '#': k = Tok::Hash; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
      push(k, std::string(1, c), 1);
    }
  }
  out.push_back(Token{Tok::End, "<eof>", 0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse_all() {
    Program p = parse_block();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
    return next();
  }
  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("expected '" + std::string(kw) + "', found '" + peek().text + "'");
    next();
  }
  std::string ident(const char* what) {
    const Token& t = expect(Tok::Ident, what);
    if (kKeywords.count(t.text)) throw ParseError("keyword '" + t.text + "' used as a name", t.line, t.column);
    return t.text;
  }
  void skip_seps() {
    while (peek().kind == Tok::Sep) next();
  }

  bool block_ends() const {
    Tok k = peek().kind;
    return k == Tok::End || k == Tok::RBrace || at_keyword("case") || at_keyword("default");
  }

  Program parse_block() {
    Program p;
    skip_seps();
    while (!block_ends()) {
      p.push_back(parse_statement());
      if (!block_ends() && peek().kind != Tok::Sep) fail("expected end of statement, found '" + peek().text + "'");
      skip_seps();
    }
    return p;
  }

  Command parse_statement() {
    if (at_keyword("go")) {
      next();
      expect(Tok::LBrace, "'{'");
      Program body = parse_block();
      expect(Tok::RBrace, "'}'");
      return Command::go(std::move(body));
    }
    if (at_keyword("select")) return parse_select();
    if (at_keyword("close")) {
      next();
      expect(Tok::LParen, "'('");
      std::string ch = ident("channel name");
      expect(Tok::RParen, "')'");
      return Command::close(std::move(ch), ++loc_);
    }
    if (peek().kind == Tok::Arrow || peek().kind == Tok::Ident) {
      if (peek().kind == Tok::Ident && peek(1).kind == Tok::Define && at_keyword("makeChan", 2)) {
        std::string target = ident("variable name");
        next();
        next();
        std::int64_t cap = 0;
        if (peek().kind == Tok::LParen) {
          next();
          expect_keyword("cap");
          const Token& n = expect(Tok::Int, "capacity");
          if (n.value < 0) throw ParseError("negative channel capacity", n.line, n.column);
          cap = n.value;
          expect(Tok::RParen, "')'");
        }
        return Command::make_chan(std::move(target), cap);
      }
      if (auto op = try_comm()) return Command::select({Branch{std::move(*op), {}}});
      std::string target = ident("statement");
      expect(Tok::Define, "':='");
      return Command::assign(std::move(target), parse_expr());
    }
    fail("unknown construct '" + peek().text + "'");
  }

  // Send `x <- e`, receive `y := <-x`, or discarding receive `<-x`.
  std::optional<CommOp> try_comm() {
    CommOp op;
    if (peek().kind == Tok::Arrow) {
      next();
      op.kind = CommOp::Kind::Recv;
      op.channel = ident("channel name");
      op.loc = ++loc_;
      return op;
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Arrow) {
      op.kind = CommOp::Kind::Send;
      op.channel = ident("channel name");
      next();
      op.loc = ++loc_;
      op.payload = parse_expr();
      return op;
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Define && peek(2).kind == Tok::Arrow) {
      op.kind = CommOp::Kind::Recv;
      op.target = ident("variable name");
      next();
      next();
      op.channel = ident("channel name");
      op.loc = ++loc_;
      return op;
    }
    return std::nullopt;
  }

  Command parse_select() {
    expect_keyword("select");
    expect(Tok::LBrace, "'{'");
    skip_seps();
    std::vector<Branch> branches;
    std::optional<Program> def;
    Loc def_loc = 0;
    while (at_keyword("case")) {
      next();
      auto op = try_comm();
      if (!op) fail("expected a send or receive after 'case'");
      expect(Tok::Colon, "':'");
      Program body = parse_block();
      branches.push_back(Branch{std::move(*op), std::move(body)});
    }
    if (at_keyword("default")) {
      next();
      def_loc = ++loc_;
      expect(Tok::Colon, "':'");
      def = parse_block();
    }
    if (at_keyword("case")) fail("'default' must be the last select case");
    expect(Tok::RBrace, "'}'");
    if (branches.empty() && !def) fail("empty select");
    return Command::select(std::move(branches), std::move(def), def_loc);
  }

  Expr parse_expr() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        next();
        return Expr::integer(t.value);
      case Tok::Hash:
        next();
        return Expr::hash(ident("name after '#'"));
      case Tok::LBracket: {
        next();
        std::vector<Expr> items;
        if (peek().kind != Tok::RBracket) {
          items.push_back(parse_expr());
          while (peek().kind == Tok::Comma) {
            next();
            items.push_back(parse_expr());
          }
        }
        expect(Tok::RBracket, "']'");
        return Expr::list(std::move(items));
      }
      case Tok::Ident: {
        if (t.text == "tid") {
          next();
          return Expr::tid();
        }
        if (t.text == "head" || t.text == "last") {
          bool head = t.text == "head";
          next();
          expect(Tok::LParen, "'('");
          Expr inner = parse_expr();
          expect(Tok::RParen, "')'");
          return head ? Expr::head(std::move(inner)) : Expr::last(std::move(inner));
        }
        return Expr::var(ident("expression"));
      }
      default:
        fail("expected an expression, found '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Loc loc_ = 0;
};

void print_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Var: out += e.name; break;
    case Expr::Kind::Int: out += std::to_string(e.value); break;
    case Expr::Kind::Hash: out += "#" + e.name; break;
    case Expr::Kind::Tid: out += "tid"; break;
    case Expr::Kind::Head:
    case Expr::Kind::Last:
      out += e.kind == Expr::Kind::Head ? "head(" : "last(";
      print_expr(e.items.at(0), out);
      out += ")";
      break;
    case Expr::Kind::List:
      out += "[";
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ", ";
        print_expr(e.items[i], out);
      }
      out += "]";
      break;
    case Expr::Kind::SendTag:
      throw Error("cannot print an instrumented program");
  }
}

void print_comm(const CommOp& op, std::string& out) {
  if (op.kind == CommOp::Kind::Send) {
    out += op.channel + " <- ";
    print_expr(op.payload, out);
  } else if (op.target.empty()) {
    out += "<-" + op.channel;
  } else {
    out += op.target + " := <-" + op.channel;
  }
}

void print_block(const Program& p, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const Command& c : p) {
    out += pad;
    switch (c.kind) {
      case Command::Kind::Assign:
        out += c.target + " := ";
        print_expr(c.expr, out);
        break;
      case Command::Kind::MakeChan:
        out += c.target + " := makeChan";
        if (c.capacity > 0) out += "(cap " + std::to_string(c.capacity) + ")";
        break;
      case Command::Kind::Go:
        out += "go {\n";
        print_block(c.body, depth + 1, out);
        out += pad + "}";
        break;
      case Command::Kind::Close:
        out += "close(" + c.target + ")";
        break;
      case Command::Kind::Select:
        if (c.branches.size() == 1 && c.branches[0].body.empty() && !c.default_body) {
          print_comm(c.branches[0].op, out);
          break;
        }
        out += "select {\n";
        for (const Branch& b : c.branches) {
          out += pad + "case ";
          print_comm(b.op, out);
          out += ":\n";
          print_block(b.body, depth + 1, out);
        }
        if (c.default_body) {
          out += pad + "default:\n";
          print_block(*c.default_body, depth + 1, out);
        }
        out += pad + "}";
        break;
      default:
        throw Error("cannot print an instrumented program");
    }
    out += "\n";
  }
}

}  // namespace

Program parse_program(std::string_view source) { return Parser(lex(source)).parse_all(); }

std::string print_program(const Program& p) {
  std::string out;
  print_block(p, 0, out);
  return out;
}

}  // namespace prepost
