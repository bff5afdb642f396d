#pragma once

#include <array>
#include <charconv>
#include <string>

#include "newton_lens/expr.hpp"

namespace newton_lens {

/// Shortest decimal text that reads back to the same double.
inline std::string shortest_repr(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace detail {

// Binding strength per grammar level: expr < term < unary < power < atom.
enum Level { level_sum = 1, level_product = 2, level_unary = 3, level_power = 4, level_atom = 5 };

inline int level_of(const Expression& e) {
  const auto& node = e.node();
  if (const auto* u = std::get_if<UnaryNode>(&node.kind)) {
    return u->op == UnaryOp::neg ? level_unary : level_atom;
  }
  if (const auto* b = std::get_if<BinaryNode>(&node.kind)) {
    switch (b->op) {
      case BinaryOp::add:
      case BinaryOp::sub: return level_sum;
      case BinaryOp::mul:
      case BinaryOp::div: return level_product;
      case BinaryOp::pow: return level_power;
    }
  }
  return level_atom;
}

inline void write(const Expression& e, std::string& out);

inline void write_wrapped(const Expression& e, bool parens, std::string& out) {
  if (parens) out += '(';
  write(e, out);
  if (parens) out += ')';
}

inline void write(const Expression& e, std::string& out) {
  const auto& node = e.node();
  if (const auto* c = std::get_if<ConstantNode>(&node.kind)) {
    out += shortest_repr(c->value);
    return;
  }
  if (std::holds_alternative<VariableNode>(node.kind)) {
    out += 'x';
    return;
  }
  if (const auto* u = std::get_if<UnaryNode>(&node.kind)) {
    if (u->op == UnaryOp::neg) {
      out += '-';
      write_wrapped(u->child, level_of(u->child) < level_unary, out);
    } else {
      out += name_of(u->op);
      out += '(';
      write(u->child, out);
      out += ')';
    }
    return;
  }
  const auto& b = std::get<BinaryNode>(node.kind);
  if (b.op == BinaryOp::pow) {
    write_wrapped(b.left, level_of(b.left) < level_atom, out);
    out += '^';
    write_wrapped(b.right, level_of(b.right) < level_atom, out);
    return;
  }
  const int self = level_of(e);
  write_wrapped(b.left, level_of(b.left) < self, out);
  switch (b.op) {
    case BinaryOp::add: out += " + "; break;
    case BinaryOp::sub: out += " - "; break;
    case BinaryOp::mul: out += "*"; break;
    case BinaryOp::div: out += "/"; break;
    default: break;
  }
  write_wrapped(b.right, level_of(b.right) <= self, out);
}

}  // namespace detail

/// Text form that parse() reads back to a structurally identical tree.
inline std::string format(const Expression& expr) {
  std::string out;
  detail::write(expr, out);
  return out;
}

}  // namespace newton_lens
