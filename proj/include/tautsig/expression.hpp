#pragma once

// Scalar expressions in one real parameter t, as used for parameterized
// matrix entries such as "exp(2*pi*i*t)".
//
// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | 'pi' | 'i' | 'e' | func '(' expr ')' | '(' expr ')'
//   func    := exp | sin | cos | sqrt

#include "tautsig/rational.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tautsig::expr {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Number, Param, Pi, I, E, Add, Sub, Mul, Div, Pow, Neg, Func };

struct Node {
  Kind kind = Kind::Number;
  Rational number;
  std::string func;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

/// Polynomial in pi with Gaussian-rational coefficients (negative powers allowed).
class PiPoly {
 public:
  PiPoly() = default;
  explicit PiPoly(GaussRational c, int pi_power = 0) {
    if (!c.is_zero()) terms_[pi_power] = std::move(c);
  }

  const std::map<int, GaussRational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// The value if it does not involve pi.
  std::optional<GaussRational> pi_free() const {
    if (terms_.empty()) return GaussRational(0);
    if (terms_.size() == 1 && terms_.begin()->first == 0) return terms_.begin()->second;
    return std::nullopt;
  }

  std::complex<double> to_complex() const {
    std::complex<double> out = 0;
    for (const auto& [k, c] : terms_) out += c.to_complex() * std::pow(std::numbers::pi, k);
    return out;
  }

  friend PiPoly operator+(PiPoly a, const PiPoly& b) {
    for (const auto& [k, c] : b.terms_) a.add(k, c);
    return a;
  }
  friend PiPoly operator-(const PiPoly& a) {
    PiPoly out;
    for (const auto& [k, c] : a.terms_) out.terms_[k] = -c;
    return out;
  }
  friend PiPoly operator-(const PiPoly& a, const PiPoly& b) { return a + (-b); }
  friend PiPoly operator*(const PiPoly& a, const PiPoly& b) {
    PiPoly out;
    for (const auto& [k, c] : a.terms_)
      for (const auto& [l, d] : b.terms_) out.add(k + l, c * d);
    return out;
  }
  /// Division by a single term; nullopt otherwise.
  static std::optional<PiPoly> divide(const PiPoly& a, const PiPoly& b) {
    if (b.terms_.size() != 1) return std::nullopt;
    const auto& [l, d] = *b.terms_.begin();
    PiPoly out;
    for (const auto& [k, c] : a.terms_) out.add(k - l, c / d);
    return out;
  }

 private:
  void add(int k, const GaussRational& c) {
    auto& slot = terms_[k];
    slot = slot + c;
    if (slot.is_zero()) terms_.erase(k);
  }

  std::map<int, GaussRational> terms_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  static NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression '" + std::string(text_) + "': " + msg);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (eat('+')) {
        n = make(Kind::Add, n, term());
      } else if (eat('-')) {
        n = make(Kind::Sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (eat('*')) {
        n = make(Kind::Mul, n, unary());
      } else if (eat('/')) {
        n = make(Kind::Div, n, unary());
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (eat('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      auto n = std::make_shared<Node>();
      n->kind = Kind::Number;
      try {
        n->number = parse_rational(text_.substr(start, pos_ - start));
      } catch (const std::exception&) {
        fail("bad number");
      }
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string word(text_.substr(start, pos_ - start));
      if (word == "t") return make(Kind::Param);
      if (word == "pi") return make(Kind::Pi);
      if (word == "i") return make(Kind::I);
      if (word == "e") return make(Kind::E);
      if (word == "exp" || word == "sin" || word == "cos" || word == "sqrt") {
        if (!eat('(')) fail("expected '(' after " + word);
        auto arg = expr();
        if (!eat(')')) fail("missing ')'");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Func;
        n->func = word;
        n->lhs = arg;
        return n;
      }
      fail("unknown identifier '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// A parsed expression together with its source text.
class Expression {
 public:
  Expression() : Expression("0") {}
  explicit Expression(std::string source) : source_(std::move(source)), root_(detail::Parser(source_).parse()) {}

  const std::string& source() const { return source_; }
  const Node& root() const { return *root_; }

  bool depends_on_parameter() const { return depends(*root_); }

  std::complex<double> evaluate(double t) const { return eval(*root_, t); }

  /// Exact value as a polynomial in pi, when the expression avoids
  /// transcendental functions (exp(0) is allowed).
  std::optional<PiPoly> evaluate_exact(const Rational& t) const { return eval_exact(*root_, t); }

  /// If the expression has the form exp(arg), the argument.
  std::optional<Expression> exponent_argument() const {
    if (root_->kind != Kind::Func || root_->func != "exp") return std::nullopt;
    Expression out;
    out.source_ = source_;
    out.root_ = root_->lhs;
    return out;
  }

 private:
  static bool depends(const Node& n) {
    if (n.kind == Kind::Param) return true;
    return (n.lhs && depends(*n.lhs)) || (n.rhs && depends(*n.rhs));
  }

  static std::complex<double> eval(const Node& n, double t) {
    using C = std::complex<double>;
    switch (n.kind) {
      case Kind::Number: return n.number.get_d();
      case Kind::Param: return t;
      case Kind::Pi: return std::numbers::pi;
      case Kind::I: return C(0, 1);
      case Kind::E: return std::numbers::e;
      case Kind::Add: return eval(*n.lhs, t) + eval(*n.rhs, t);
      case Kind::Sub: return eval(*n.lhs, t) - eval(*n.rhs, t);
      case Kind::Mul: return eval(*n.lhs, t) * eval(*n.rhs, t);
      case Kind::Div: return eval(*n.lhs, t) / eval(*n.rhs, t);
      case Kind::Neg: return -eval(*n.lhs, t);
      case Kind::Pow: {
        C base = eval(*n.lhs, t);
        C ex = eval(*n.rhs, t);
        if (ex.imag() == 0 && ex.real() == std::round(ex.real()) && std::abs(ex.real()) < 64) {
          C out = 1;
          long k = std::lround(ex.real());
          for (long j = 0; j < std::labs(k); ++j) out *= base;
          return k < 0 ? C(1) / out : out;
        }
        return std::pow(base, ex);
      }
      case Kind::Func: {
        C a = eval(*n.lhs, t);
        if (n.func == "exp") return std::exp(a);
        if (n.func == "sin") return std::sin(a);
        if (n.func == "cos") return std::cos(a);
        return std::sqrt(a);
      }
    }
    return 0;
  }

  static std::optional<PiPoly> eval_exact(const Node& n, const Rational& t) {
    switch (n.kind) {
      case Kind::Number: return PiPoly(GaussRational(n.number));
      case Kind::Param: return PiPoly(GaussRational(t));
      case Kind::Pi: return PiPoly(GaussRational(1), 1);
      case Kind::I: return PiPoly(GaussRational::i());
      case Kind::E: return std::nullopt;
      case Kind::Neg: {
        auto a = eval_exact(*n.lhs, t);
        if (!a) return std::nullopt;
        return -*a;
      }
      case Kind::Add:
      case Kind::Sub:
      case Kind::Mul:
      case Kind::Div: {
        auto a = eval_exact(*n.lhs, t);
        auto b = eval_exact(*n.rhs, t);
        if (!a || !b) return std::nullopt;
        if (n.kind == Kind::Add) return *a + *b;
        if (n.kind == Kind::Sub) return *a - *b;
        if (n.kind == Kind::Mul) return *a * *b;
        return PiPoly::divide(*a, *b);
      }
      case Kind::Pow: {
        auto a = eval_exact(*n.lhs, t);
        auto b = eval_exact(*n.rhs, t);
        if (!a || !b) return std::nullopt;
        auto e = b->pi_free();
        if (!e || e->im() != 0 || e->re().get_den() != 1) return std::nullopt;
        long k = e->re().get_num().get_si();
        if (std::labs(k) > 64) return std::nullopt;
        PiPoly out(GaussRational(1));
        for (long j = 0; j < std::labs(k); ++j) out = out * *a;
        if (k < 0) return PiPoly::divide(PiPoly(GaussRational(1)), out);
        return out;
      }
      case Kind::Func: {
        auto a = eval_exact(*n.lhs, t);
        if (!a || !a->is_zero()) return std::nullopt;
        if (n.func == "exp" || n.func == "cos") return PiPoly(GaussRational(1));
        return PiPoly();
      }
    }
    return std::nullopt;
  }

  std::string source_;
  NodePtr root_;
};

}  // namespace tautsig::expr
