#pragma once

// Expression language for phi(t, s).
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | atom ['^' factor]
//   atom   := number | 't' | 's' | func '(' expr ')' | '(' expr ')'
//   func   := 'exp' | 'log' | 'sqrt'
//
// '^' is right-associative and binds tighter than unary minus, so -s^2 is
// -(s^2). Whitespace is insignificant. Numbers are decimal literals with an
// optional exponent. A '^' whose exponent is an integer literal (optionally
// negated) is flagged and evaluated by repeated multiplication.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ufinsler/errors.hpp"
#include "ufinsler/jet.hpp"

namespace ufinsler {

enum class UnaryOp { neg, exp, log, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Constant {
  double value;
  bool integer_literal = false;
};

struct VariableRef {
  Variable which;
};

struct Unary {
  UnaryOp op;
  ExprPtr arg;
};

struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
  /// Set for pow when the exponent is a syntactic integer literal.
  std::optional<long> integer_exponent;
};

struct Expr {
  std::variant<Constant, VariableRef, Unary, Binary> node;
};

inline ExprPtr make_constant(double v, bool integer_literal = false) {
  return std::make_shared<const Expr>(Expr{Constant{v, integer_literal}});
}
inline ExprPtr make_variable(Variable v) {
  return std::make_shared<const Expr>(Expr{VariableRef{v}});
}
inline ExprPtr make_unary(UnaryOp op, ExprPtr arg) {
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(arg)}});
}

namespace detail {

inline std::optional<long> integer_literal_value(const Expr& e) {
  if (const auto* c = std::get_if<Constant>(&e.node); c && c->integer_literal) {
    return static_cast<long>(c->value);
  }
  if (const auto* u = std::get_if<Unary>(&e.node); u && u->op == UnaryOp::neg) {
    if (auto inner = integer_literal_value(*u->arg)) return -*inner;
  }
  return std::nullopt;
}

}  // namespace detail

inline ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  std::optional<long> exponent;
  if (op == BinaryOp::pow) exponent = detail::integer_literal_value(*rhs);
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs), exponent}});
}

/// Structural equality of two trees.
inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Constant>) {
          return lhs.value == rhs.value && lhs.integer_literal == rhs.integer_literal;
        } else if constexpr (std::is_same_v<T, VariableRef>) {
          return lhs.which == rhs.which;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return lhs.op == rhs.op && equal(*lhs.arg, *rhs.arg);
        } else {
          return lhs.op == rhs.op && lhs.integer_exponent == rhs.integer_exponent &&
                 equal(*lhs.lhs, *rhs.lhs) && equal(*lhs.rhs, *rhs.rhs);
        }
      },
      a.node);
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) { return equal(*a, *b); }

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input", {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    throw ParseError(what, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(BinaryOp::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_binary(BinaryOp::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    auto lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(BinaryOp::mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = make_binary(BinaryOp::div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    if (accept('-')) return make_unary(UnaryOp::neg, parse_factor());
    auto base = parse_atom();
    if (accept('^')) return make_binary(BinaryOp::pow, base, parse_factor());
    return base;
  }

  ExprPtr parse_atom() {
    static const std::vector<std::string> kAtomStart = {"number", "'t'", "'s'", "'exp'", "'log'",
                                                        "'sqrt'", "'('", "'-'"};
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input", kAtomStart);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!accept(')')) fail("unbalanced parenthesis", {"')'"});
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "t") return make_variable(Variable::t);
      if (word == "s") return make_variable(Variable::s);
      std::optional<UnaryOp> op;
      if (word == "exp") op = UnaryOp::exp;
      if (word == "log") op = UnaryOp::log;
      if (word == "sqrt") op = UnaryOp::sqrt;
      if (!op) {
        pos_ = start;
        fail("unknown identifier '" + std::string(word) + "'", kAtomStart);
      }
      if (!accept('(')) fail("expected '(' after function name", {"'('"});
      auto arg = parse_expr();
      if (!accept(')')) fail("unbalanced parenthesis", {"')'"});
      return make_unary(*op, arg);
    }
    fail(std::string("unexpected character '") + c + "'", kAtomStart);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    bool integer = true;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      integer = false;
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("malformed number", {"digit"});
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      integer = false;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent", {"digit"});
    }
    double value = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("number out of range", {"number"});
    }
    if (integer && value > 1e9) integer = false;
    return make_constant(value, integer);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline ExprPtr parse_metric(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printer

namespace detail {

// Binding strength of the printed form of a node.
enum Level { kSum = 1, kProduct = 2, kNeg = 3, kPower = 4, kAtom = 5 };

inline int level_of(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    switch (b->op) {
      case BinaryOp::add:
      case BinaryOp::sub: return kSum;
      case BinaryOp::mul:
      case BinaryOp::div: return kProduct;
      case BinaryOp::pow: return kPower;
    }
  }
  if (const auto* u = std::get_if<Unary>(&e.node); u && u->op == UnaryOp::neg) return kNeg;
  if (const auto* c = std::get_if<Constant>(&e.node); c && (c->value < 0 || std::signbit(c->value))) {
    return kNeg;
  }
  return kAtom;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

inline std::string render(const Expr& e);

inline std::string wrap(const Expr& e, int min_level) {
  std::string inner = render(e);
  return level_of(e) < min_level ? "(" + inner + ")" : inner;
}

inline std::string render(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          std::string text = format_number(n.value);
          if (!n.integer_literal && text.find_first_of(".eEn") == std::string::npos) text += ".0";
          return text;
        } else if constexpr (std::is_same_v<T, VariableRef>) {
          return n.which == Variable::t ? "t" : "s";
        } else if constexpr (std::is_same_v<T, Unary>) {
          switch (n.op) {
            case UnaryOp::neg: return "-" + wrap(*n.arg, kNeg);
            case UnaryOp::exp: return "exp(" + render(*n.arg) + ")";
            case UnaryOp::log: return "log(" + render(*n.arg) + ")";
            case UnaryOp::sqrt: return "sqrt(" + render(*n.arg) + ")";
          }
          return {};
        } else {
          switch (n.op) {
            case BinaryOp::add: return wrap(*n.lhs, kSum) + " + " + wrap(*n.rhs, kProduct);
            case BinaryOp::sub: return wrap(*n.lhs, kSum) + " - " + wrap(*n.rhs, kProduct);
            case BinaryOp::mul: return wrap(*n.lhs, kProduct) + "*" + wrap(*n.rhs, kNeg);
            case BinaryOp::div: return wrap(*n.lhs, kProduct) + "/" + wrap(*n.rhs, kNeg);
            case BinaryOp::pow: return wrap(*n.lhs, kAtom) + "^" + wrap(*n.rhs, kNeg);
          }
          return {};
        }
      },
      e.node);
}

}  // namespace detail

/// Canonical text form; parse(print(e)) reproduces e.
inline std::string print(const Expr& e) { return detail::render(e); }
inline std::string print(const ExprPtr& e) { return detail::render(*e); }

// ---------------------------------------------------------------------------
// Evaluation

inline Jet2 evaluate(const Expr& e, double t, double s) {
  return std::visit(
      [&](const auto& n) -> Jet2 {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return Jet2::constant(n.value);
        } else if constexpr (std::is_same_v<T, VariableRef>) {
          return jet_seed(n.which, t, s);
        } else if constexpr (std::is_same_v<T, Unary>) {
          const Jet2 a = evaluate(*n.arg, t, s);
          switch (n.op) {
            case UnaryOp::neg: return -a;
            case UnaryOp::exp: return exp(a);
            case UnaryOp::log: return log(a);
            case UnaryOp::sqrt: return sqrt(a);
          }
          return a;
        } else {
          const Jet2 a = evaluate(*n.lhs, t, s);
          if (n.op == BinaryOp::pow && n.integer_exponent) return pow(a, *n.integer_exponent);
          const Jet2 b = evaluate(*n.rhs, t, s);
          switch (n.op) {
            case BinaryOp::add: return a + b;
            case BinaryOp::sub: return a - b;
            case BinaryOp::mul: return a * b;
            case BinaryOp::div: return a / b;
            case BinaryOp::pow: return pow(a, b);
          }
          return a;
        }
      },
      e.node);
}

inline Jet2 evaluate(const ExprPtr& e, double t, double s) { return evaluate(*e, t, s); }

}  // namespace ufinsler
