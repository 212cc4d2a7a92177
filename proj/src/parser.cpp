#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

#include "mcalc/parser.hpp"

namespace mcalc {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Had, Div, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, i_, {}});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }

  bool starts_with(std::string_view s) const { return src_.substr(i_, s.size()) == s; }

  Token take(Tok kind, std::size_t len) {
    Token t{kind, i_, src_.substr(i_, len)};
    i_ += len;
    return t;
  }

  Token next() {
    const char c = src_[i_];
    if (starts_with("(*)")) return take(Tok::Had, 3);
    if (starts_with("(/)")) return take(Tok::Div, 3);
    if (starts_with("⊗")) return take(Tok::Had, 3);
    if (starts_with("⊘")) return take(Tok::Div, 3);
    switch (c) {
      case '+': return take(Tok::Plus, 1);
      case '-': return take(Tok::Minus, 1);
      case '*': return take(Tok::Star, 1);
      case '^': return take(Tok::Caret, 1);
      case '(': return take(Tok::LParen, 1);
      case ')': return take(Tok::RParen, 1);
      case ',': return take(Tok::Comma, 1);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      return take(Tok::Ident, j - i_);
    }
    throw SyntaxError("unexpected character '" + std::string(1, c) + "'", i_);
  }

  Token number() {
    auto digits = [&](std::size_t j) {
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      return j;
    };
    std::size_t j = digits(i_);
    if (j < src_.size() && src_[j] == '.') j = digits(j + 1);
    if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) j = digits(k);
    }
    Token t = take(Tok::Number, j - i_);
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw SyntaxError("malformed number '" + std::string(t.text) + "'", t.pos);
    }
    return t;
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const Declarations& decls) : toks_(std::move(toks)), decls_(decls) {}

  Expr run() {
    Expr e = expr();
    if (peek().kind != Tok::End) throw SyntaxError("unexpected " + describe(peek()), peek().pos);
    return e;
  }

 private:
  const Token& peek() const { return toks_[k_]; }
  const Token& advance() { return toks_[k_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++k_;
    return true;
  }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) throw SyntaxError(std::string("expected ") + what + ", found " + describe(peek()), peek().pos);
    return advance();
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept(Tok::Plus)) {
        lhs = add(lhs, term());
      } else if (accept(Tok::Minus)) {
        lhs = sub(lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept(Tok::Star)) {
        lhs = mul(lhs, unary());
      } else if (accept(Tok::Had)) {
        lhs = hadamard(lhs, unary());
      } else if (accept(Tok::Div)) {
        lhs = hadamard_div(lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept(Tok::Minus)) return neg(unary());
    return factor();
  }

  Expr factor() {
    Expr base = atom();
    if (!accept(Tok::Caret)) return base;
    const bool negative = accept(Tok::Minus);
    const Token& t = expect(Tok::Number, "a numeric exponent");
    return pow(base, negative ? -t.number : t.number);
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        advance();
        return constant(t.number);
      case Tok::LParen: {
        advance();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        advance();
        if (peek().kind == Tok::LParen) return call(t);
        return identifier(t);
      default:
        throw SyntaxError("expected an operand, found " + describe(t), t.pos);
    }
  }

  Expr call(const Token& name) {
    static const std::map<std::string_view, Op> kFunctions = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"ln", Op::Ln},   {"exp", Op::Exp},
        {"max0", Op::Max0}, {"step", Op::Step}, {"sum", Op::Sum}, {"dot", Op::Dot},
    };
    auto it = kFunctions.find(name.text);
    if (it == kFunctions.end()) throw UnknownFunction(std::string(name.text), name.pos);
    expect(Tok::LParen, "'('");
    std::vector<Expr> args;
    args.push_back(expr());
    while (accept(Tok::Comma)) args.push_back(expr());
    expect(Tok::RParen, "')'");
    return build(it->second, std::move(args));
  }

  Expr identifier(const Token& t) {
    std::string name(t.text);
    if (auto it = decls_.find(name); it != decls_.end()) return var(name, it->second);
    if (auto underscore = name.rfind('_'); underscore != std::string::npos && underscore + 1 < name.size()) {
      std::string base = name.substr(0, underscore);
      std::string_view idx = std::string_view(name).substr(underscore + 1);
      std::size_t k = 0;
      auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
      auto it = decls_.find(base);
      if (ec == std::errc() && ptr == idx.data() + idx.size() && it != decls_.end() && it->second.is_vector()) {
        if (k == 0 || k > it->second.size()) {
          throw SyntaxError("element index out of range for '" + base + "'", t.pos);
        }
        return element(base, k - 1, it->second.size());
      }
    }
    return var(name);
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
  const Declarations& decls_;
};

}  // namespace

Expr parse(std::string_view text, const Declarations& declarations) {
  return Parser(Lexer(text).run(), declarations).run();
}

}  // namespace mcalc
