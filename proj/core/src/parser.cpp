#include "covgen/parser.hpp"

#include <cctype>
#include <map>
#include <set>

#include "covgen/error.hpp"

namespace covgen {
namespace {

enum class Tok {
  Ident,
  Number,
  KwProc,
  KwReturns,
  KwGoto,
  KwAssume,
  KwCall,
  KwTrue,
  KwFalse,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Define,  // :=
  Plus,
  Minus,
  Star,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  Bang,
  AndAnd,
  OrOr,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "integer literal";
    case Tok::KwProc: return "'proc'";
    case Tok::KwReturns: return "'returns'";
    case Tok::KwGoto: return "'goto'";
    case Tok::KwAssume: return "'assume'";
    case Tok::KwCall: return "'call'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Define: return "':='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Bang: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::vector<Token> lex(std::string_view src) {
  static const std::map<std::string, Tok, std::less<>> keywords = {
      {"proc", Tok::KwProc},     {"returns", Tok::KwReturns},
      {"goto", Tok::KwGoto},     {"assume", Tok::KwAssume},
      {"call", Tok::KwCall},     {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},
  };
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      std::string word(src.substr(i, j - i));
      auto kw = keywords.find(word);
      out.push_back({kw == keywords.end() ? Tok::Ident : kw->second, word, tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() &&
          (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        throw ParseError("malformed integer literal", tl, tc);
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    auto two = [&](char next) { return i + 1 < src.size() && src[i + 1] == next; };
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case ':':
        if (two('=')) { kind = Tok::Define; len = 2; } else { kind = Tok::Colon; }
        break;
      case '<':
        if (two('=')) { kind = Tok::Le; len = 2; } else { kind = Tok::Lt; }
        break;
      case '>':
        if (two('=')) { kind = Tok::Ge; len = 2; } else { kind = Tok::Gt; }
        break;
      case '=':
        if (!two('=')) throw ParseError("unexpected character '='", tl, tc);
        kind = Tok::EqEq;
        len = 2;
        break;
      case '!':
        if (two('=')) { kind = Tok::Ne; len = 2; } else { kind = Tok::Bang; }
        break;
      case '&':
        if (!two('&')) throw ParseError("unexpected character '&'", tl, tc);
        kind = Tok::AndAnd;
        len = 2;
        break;
      case '|':
        if (!two('|')) throw ParseError("unexpected character '|'", tl, tc);
        kind = Tok::OrOr;
        len = 2;
        break;
      default: {
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? std::string(1, c)
                                : "\\x" + std::to_string(static_cast<unsigned char>(c));
        throw ParseError("unexpected character '" + shown + "'", tl, tc);
      }
    }
    out.push_back({kind, std::string(src.substr(i, len)), tl, tc});
    advance(len);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program prog;
    std::set<std::string> names;
    if (peek().kind == Tok::End) error(peek(), "expected at least one procedure");
    while (peek().kind != Tok::End) {
      const Token& at = peek(1);
      Procedure p = procedure();
      if (!names.insert(p.name).second) {
        throw ParseError("duplicate procedure name " + p.name, at.line, at.column);
      }
      prog.procedures.push_back(std::move(p));
    }
    return prog;
  }

  ExprPtr lone_expr() {
    ExprPtr e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  struct GotoRef {
    std::string label;
    std::size_t line, column;
  };

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }

  [[noreturn]] void error(const Token& t, const std::string& msg) {
    throw ParseError(msg, t.line, t.column);
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) {
      std::string found = peek().kind == Tok::End ? "end of input"
                                                  : "'" + peek().text + "'";
      error(peek(), std::string("expected ") + describe(k) + ", found " + found);
    }
    return next();
  }

  Procedure procedure() {
    expect(Tok::KwProc);
    Procedure p;
    p.name = expect(Tok::Ident).text;
    expect(Tok::LParen);
    if (peek().kind != Tok::RParen) {
      do {
        const Token& t = expect(Tok::Ident);
        for (const auto& q : p.params) {
          if (q == t.text) error(t, "duplicate parameter " + t.text);
        }
        p.params.push_back(t.text);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    if (accept(Tok::KwReturns)) p.returns = expect(Tok::Ident).text;
    expect(Tok::LBrace);
    std::set<std::string> labels;
    std::vector<GotoRef> gotos;
    do {
      const Token& lt = peek();
      Block b = block(gotos);
      if (!labels.insert(b.label).second) {
        error(lt, "duplicate label " + b.label + " in procedure " + p.name);
      }
      p.blocks.push_back(std::move(b));
    } while (peek().kind != Tok::RBrace);
    expect(Tok::RBrace);
    for (const auto& g : gotos) {
      if (!labels.count(g.label)) {
        throw ParseError("unresolved goto target " + g.label, g.line, g.column);
      }
    }
    return p;
  }

  bool at_block_start() const {
    return peek().kind == Tok::Ident && peek(1).kind == Tok::Colon;
  }

  Block block(std::vector<GotoRef>& gotos) {
    if (!at_block_start()) error(peek(), "expected block label");
    Block b;
    b.label = next().text;
    expect(Tok::Colon);
    while (peek().kind != Tok::RBrace && peek().kind != Tok::KwGoto &&
           !at_block_start()) {
      b.stmts.push_back(stmt());
    }
    if (accept(Tok::KwGoto)) {
      do {
        const Token& t = expect(Tok::Ident);
        gotos.push_back({t.text, t.line, t.column});
        b.succs.push_back(t.text);
      } while (accept(Tok::Comma));
      expect(Tok::Semi);
    }
    return b;
  }

  Stmt stmt() {
    if (accept(Tok::KwAssume)) {
      ExprPtr e = expr();
      expect(Tok::Semi);
      return Assume{std::move(e)};
    }
    if (peek().kind == Tok::KwCall) return call(std::nullopt);
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Define) {
      std::string target = next().text;
      next();
      if (peek().kind == Tok::KwCall) return call(std::move(target));
      ExprPtr e = expr();
      expect(Tok::Semi);
      return Assign{std::move(target), std::move(e)};
    }
    error(peek(), "expected statement, found '" + peek().text + "'");
  }

  Stmt call(std::optional<std::string> target) {
    expect(Tok::KwCall);
    Call c;
    c.target = std::move(target);
    c.callee = expect(Tok::Ident).text;
    expect(Tok::LParen);
    if (peek().kind != Tok::RParen) {
      do {
        c.args.push_back(expr());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    expect(Tok::Semi);
    return c;
  }

  // Precedence climbing, loosest first: || , && , comparisons, + -, *, unary.
  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (accept(Tok::OrOr)) lhs = binary(Op::Or, lhs, and_expr());
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = cmp_expr();
    while (accept(Tok::AndAnd)) lhs = binary(Op::And, lhs, cmp_expr());
    return lhs;
  }

  ExprPtr cmp_expr() {
    ExprPtr lhs = add_expr();
    for (;;) {
      Op op;
      switch (peek().kind) {
        case Tok::Lt: op = Op::Lt; break;
        case Tok::Le: op = Op::Le; break;
        case Tok::Gt: op = Op::Gt; break;
        case Tok::Ge: op = Op::Ge; break;
        case Tok::EqEq: op = Op::Eq; break;
        case Tok::Ne: op = Op::Ne; break;
        default: return lhs;
      }
      next();
      lhs = binary(op, lhs, add_expr());
    }
  }

  ExprPtr add_expr() {
    ExprPtr lhs = mul_expr();
    for (;;) {
      if (accept(Tok::Plus)) {
        lhs = binary(Op::Add, lhs, mul_expr());
      } else if (accept(Tok::Minus)) {
        lhs = binary(Op::Sub, lhs, mul_expr());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr mul_expr() {
    ExprPtr lhs = unary_expr();
    while (accept(Tok::Star)) lhs = binary(Op::Mul, lhs, unary_expr());
    return lhs;
  }

  ExprPtr unary_expr() {
    if (accept(Tok::Minus)) return unary(Op::Neg, unary_expr());
    if (accept(Tok::Bang)) return unary(Op::Not, unary_expr());
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        next();
        return int_lit(Int(t.text));
      case Tok::KwTrue:
        next();
        return bool_lit(true);
      case Tok::KwFalse:
        next();
        return bool_lit(false);
      case Tok::Ident:
        next();
        return var(t.text);
      case Tok::LParen: {
        next();
        ExprPtr e = expr();
        expect(Tok::RParen);
        return e;
      }
      default:
        error(t, t.kind == Tok::End ? "expected expression, found end of input"
                                    : "expected expression, found '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) {
  Parser p(lex(text));
  return p.program();
}

ExprPtr parse_expr(std::string_view text) {
  Parser p(lex(text));
  return p.lone_expr();
}

}  // namespace covgen
