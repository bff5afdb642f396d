#pragma once

// Recursive-descent parser for the expression grammar
//
//   expr  := term (("+"|"-") term)*
//   term  := unary (("*"|"/") unary)*
//   unary := "-" unary | power
//   power := atom ("^" unary)?
//   atom  := NUMBER | "x" | "e" | "pi" | FUNC "(" expr ")" | "(" expr ")"
//
// so "-x^2" is -(x^2) and "x^y^z" is x^(y^z).

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newton_lens/expr.hpp"

namespace newton_lens {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}

  /// Byte offset into the input where parsing failed.
  [[nodiscard]] std::size_t offset() const { return offset_; }
  [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

namespace detail {

enum class TokenKind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  TokenKind kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

inline std::string describe(const Token& t) {
  if (t.kind == TokenKind::end) return "end of input";
  return "'" + std::string(t.text) + "'";
}

inline std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " or " : ", ";
    out += items[i];
  }
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({TokenKind::end, pos_, {}});
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number());
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        out.push_back({TokenKind::ident, start, src_.substr(start, pos_ - start)});
      } else {
        TokenKind kind;
        switch (c) {
          case '+': kind = TokenKind::plus; break;
          case '-': kind = TokenKind::minus; break;
          case '*': kind = TokenKind::star; break;
          case '/': kind = TokenKind::slash; break;
          case '^': kind = TokenKind::caret; break;
          case '(': kind = TokenKind::lparen; break;
          case ')': kind = TokenKind::rparen; break;
          default:
            throw ParseError(pos_, {"number", "'x'", "function", "operator"},
                             "unexpected character '" + std::string(1, c) + "' at offset " +
                                 std::to_string(pos_));
        }
        out.push_back({kind, pos_, src_.substr(pos_, 1)});
        ++pos_;
      }
    }
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool digit_at(std::size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  Token number() {
    const std::size_t start = pos_;
    while (digit_at(pos_)) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (digit_at(pos_)) ++pos_;
    }
    // Exponent only when digits follow; "2e" leaves the 'e' for the next token.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (digit_at(p)) {
        pos_ = p;
        while (digit_at(pos_)) ++pos_;
      }
    }
    Token t{TokenKind::number, start, src_.substr(start, pos_ - start)};
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (res.ec != std::errc{} || !std::isfinite(t.number)) {
      throw ParseError(start, {"finite number"},
                       "number out of range at offset " + std::to_string(start));
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Lexer(src).run()) {}

  Expression parse_all() {
    Expression e = expr();
    if (peek().kind != TokenKind::end) fail({"operator", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    throw ParseError(t.offset, expected,
                     "expected " + join(expected) + " but found " + describe(t) + " at offset " +
                         std::to_string(t.offset));
  }

  void expect(TokenKind kind, const char* what) {
    if (peek().kind != kind) fail({what});
    ++pos_;
  }

  // Evaluation and differentiation recurse over the tree, so its height is
  // bounded here rather than by the stack.
  void check_depth(const Expression& e) const {
    if (e.node().depth > max_depth) {
      throw ParseError(peek().offset, {}, "expression nests deeper than " + std::to_string(max_depth) + " levels");
    }
  }

  Expression expr() {
    Expression lhs = term();
    while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
      const BinaryOp op = advance().kind == TokenKind::plus ? BinaryOp::add : BinaryOp::sub;
      lhs = Expression::binary(op, std::move(lhs), term());
      check_depth(lhs);
    }
    return lhs;
  }

  Expression term() {
    Expression lhs = unary();
    while (peek().kind == TokenKind::star || peek().kind == TokenKind::slash) {
      const BinaryOp op = advance().kind == TokenKind::star ? BinaryOp::mul : BinaryOp::div;
      lhs = Expression::binary(op, std::move(lhs), unary());
      check_depth(lhs);
    }
    return lhs;
  }

  Expression unary() {
    if (++nesting_ > max_depth) {
      throw ParseError(peek().offset, {}, "expression nests deeper than " + std::to_string(max_depth) + " levels");
    }
    struct Leave {
      std::size_t& n;
      ~Leave() { --n; }
    } leave{nesting_};
    if (peek().kind == TokenKind::minus) {
      ++pos_;
      return Expression::unary(UnaryOp::neg, unary());
    }
    return power();
  }

  Expression power() {
    Expression base = atom();
    if (peek().kind == TokenKind::caret) {
      ++pos_;
      return Expression::binary(BinaryOp::pow, std::move(base), unary());
    }
    return base;
  }

  static std::optional<UnaryOp> function_named(std::string_view name) {
    if (name == "abs") return UnaryOp::abs;
    if (name == "sqrt") return UnaryOp::sqrt;
    if (name == "cbrt") return UnaryOp::cbrt;
    if (name == "exp") return UnaryOp::exp;
    if (name == "ln") return UnaryOp::ln;
    if (name == "sin") return UnaryOp::sin;
    if (name == "cos") return UnaryOp::cos;
    if (name == "tan") return UnaryOp::tan;
    return std::nullopt;
  }

  Expression atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::number:
        ++pos_;
        return Expression::constant(t.number);
      case TokenKind::lparen: {
        ++pos_;
        Expression inner = expr();
        expect(TokenKind::rparen, "')'");
        return inner;
      }
      case TokenKind::ident: {
        if (t.text == "x") {
          ++pos_;
          return Expression::variable();
        }
        if (t.text == "e") {
          ++pos_;
          return Expression::constant(std::numbers::e);
        }
        if (t.text == "pi") {
          ++pos_;
          return Expression::constant(std::numbers::pi);
        }
        if (auto op = function_named(t.text)) {
          ++pos_;
          expect(TokenKind::lparen, "'('");
          Expression arg = expr();
          expect(TokenKind::rparen, "')'");
          return Expression::unary(*op, std::move(arg));
        }
        throw ParseError(t.offset, {"'x'", "'e'", "'pi'", "function name"},
                         "unknown identifier '" + std::string(t.text) + "' at offset " +
                             std::to_string(t.offset));
      }
      default:
        fail({"number", "'x'", "'e'", "'pi'", "function", "'('"});
    }
  }

  static constexpr std::size_t max_depth = 256;

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t nesting_ = 0;
};

}  // namespace detail

/// Parses `text` or throws ParseError carrying the byte offset of the failure.
inline Expression parse(std::string_view text) { return detail::Parser(text).parse_all(); }

}  // namespace newton_lens
