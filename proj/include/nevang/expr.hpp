#pragma once

// Entire functions of one complex variable z, built from constants, z, +, -,
// *, nonnegative integer powers, exp, sin, cos and unary minus. There is no
// division node, so every expression is entire.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nevang/errors.hpp"
#include "nevang/series.hpp"

namespace nevang {

class Expr {
 public:
  enum class Kind { Constant, Var, Add, Sub, Mul, Pow, Exp, Sin, Cos, Neg };

  struct Node {
    Kind kind;
    Complex value{};        // Constant
    unsigned exponent = 0;  // Pow
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(Complex c) { return Expr(make(Kind::Constant, nullptr, nullptr, c)); }
  static Expr z() {
    static const auto var = std::make_shared<const Node>(Node{Kind::Var, {}, 0, nullptr, nullptr});
    return Expr(var);
  }

  friend Expr operator+(const Expr& a, const Expr& b) { return Expr(make(Kind::Add, a.node_, b.node_)); }
  friend Expr operator-(const Expr& a, const Expr& b) { return Expr(make(Kind::Sub, a.node_, b.node_)); }
  friend Expr operator*(const Expr& a, const Expr& b) { return Expr(make(Kind::Mul, a.node_, b.node_)); }
  friend Expr operator-(const Expr& a) { return Expr(make(Kind::Neg, a.node_, nullptr)); }
  friend Expr pow(const Expr& base, unsigned n) {
    return Expr(make(Kind::Pow, base.node_, nullptr, {}, n));
  }
  friend Expr exp(const Expr& a) { return Expr(make(Kind::Exp, a.node_, nullptr)); }
  friend Expr sin(const Expr& a) { return Expr(make(Kind::Sin, a.node_, nullptr)); }
  friend Expr cos(const Expr& a) { return Expr(make(Kind::Cos, a.node_, nullptr)); }

  Kind kind() const { return node_->kind; }
  Complex value() const { return node_->value; }
  unsigned exponent() const { return node_->exponent; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }
  const Node* node() const { return node_.get(); }

  bool is_constant(Complex c) const { return kind() == Kind::Constant && value() == c; }

  // Structural equality.
  friend bool operator==(const Expr& a, const Expr& b) { return same(a.node_.get(), b.node_.get()); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(Kind k, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r,
                                          Complex v = {}, unsigned exponent = 0) {
    return std::make_shared<const Node>(Node{k, v, exponent, std::move(l), std::move(r)});
  }

  static bool same(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->kind != b->kind || a->exponent != b->exponent) return false;
    if (a->kind == Kind::Constant) return a->value == b->value;
    return same(a->lhs.get(), b->lhs.get()) && same(a->rhs.get(), b->rhs.get());
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_constant(Complex c) {
  if (c.imag() == 0.0 && !std::signbit(c.real())) return format_real(c.real());
  if (c.real() == 0.0 && !std::signbit(c.real()) && !std::signbit(c.imag())) return format_real(c.imag()) + "i";
  std::string s = "(" + format_real(c.real());
  s += std::signbit(c.imag()) ? "-" : "+";
  s += format_real(std::abs(c.imag())) + "i)";
  return s;
}

// Precedence levels: 0 sum, 1 term, 2 factor, 3 atom.
inline int level(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 0;
    case Expr::Kind::Mul: return 1;
    case Expr::Kind::Pow: return 2;
    default: return 3;
  }
}

inline void print_at(const Expr& e, int min_level, std::string& out) {
  const bool paren = level(e.kind()) < min_level;
  if (paren) out += '(';
  switch (e.kind()) {
    case Expr::Kind::Constant: out += format_constant(e.value()); break;
    case Expr::Kind::Var: out += 'z'; break;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      print_at(e.lhs(), 0, out);
      out += e.kind() == Expr::Kind::Add ? " + " : " - ";
      print_at(e.rhs(), 1, out);
      break;
    case Expr::Kind::Mul:
      print_at(e.lhs(), 1, out);
      out += '*';
      print_at(e.rhs(), 2, out);
      break;
    case Expr::Kind::Pow:
      print_at(e.lhs(), 3, out);
      out += '^' + std::to_string(e.exponent());
      break;
    case Expr::Kind::Neg:
      out += '-';
      print_at(e.lhs(), 3, out);
      break;
    case Expr::Kind::Exp:
    case Expr::Kind::Sin:
    case Expr::Kind::Cos:
      out += e.kind() == Expr::Kind::Exp ? "exp(" : e.kind() == Expr::Kind::Sin ? "sin(" : "cos(";
      print_at(e.lhs(), 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_at(e, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' uint)?
//   atom   := 'z' | literal | func '(' expr ')' | '(' expr ')' | '-' atom
//   literal:= float | float 'i' | '(' [sign] float ('+'|'-') float 'i' ')'
//
// The variable name is configurable so the homogeneous-form grammar can reuse
// the scanner helpers.

namespace detail {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) fail(std::string("expected ") + what);
  }
  bool at_end() { return peek() == '\0'; }
  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }
  std::string_view text() const { return text_; }

  [[noreturn]] void fail(const std::string& msg) const {
    if (pos_ < text_.size() && text_[pos_] == '/') {
      throw ParseError("division is not allowed in an entire expression; write the quotient as a MeroFn "
                       "(separate numerator and denominator)",
                       pos_);
    }
    throw ParseError(msg, pos_);
  }

  bool starts_number() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  // Unsigned decimal float with optional exponent.
  double number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    if (tok.empty() || tok == ".") {
      pos_ = start;
      fail("expected a number");
    }
    return std::strtod(tok.c_str(), nullptr);
  }

  unsigned uint() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent");
    const unsigned long v = std::strtoul(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr, 10);
    if (v > 4096) {
      pos_ = start;
      fail("exponent too large");
    }
    return static_cast<unsigned>(v);
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    if (text_.substr(pos_, kw.size()) != kw) return false;
    const std::size_t end = pos_ + kw.size();
    if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
    pos_ = end;
    return true;
  }

  // Tries '(' [sign] float ('+'|'-') float 'i' ')'; restores position on mismatch.
  bool paren_complex(Complex& out) {
    const std::size_t save = pos_;
    if (!accept('(')) return false;
    double sign = 1.0;
    if (accept('-')) sign = -1.0;
    else accept('+');
    if (!starts_number()) return reset_false(save);
    const double re = sign * number();
    double isign;
    if (accept('+')) isign = 1.0;
    else if (accept('-')) isign = -1.0;
    else return reset_false(save);
    if (!starts_number()) return reset_false(save);
    const double im = isign * number();
    if (!accept('i')) return reset_false(save);
    if (!accept(')')) return reset_false(save);
    out = {re, im};
    return true;
  }

 private:
  bool reset_false(std::size_t p) {
    pos_ = p;
    return false;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  Expr parse() {
    if (s_.at_end()) s_.fail("empty expression");
    Expr e = expr();
    if (!s_.at_end()) s_.fail("unexpected character");
    return e;
  }

 private:
  Expr expr() {
    Expr e = term();
    for (;;) {
      if (s_.accept('+')) e = e + term();
      else if (s_.accept('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = factor();
    while (s_.accept('*')) e = e * factor();
    return e;
  }
  Expr factor() {
    Expr a = atom();
    if (s_.accept('^')) return pow(a, s_.uint());
    return a;
  }
  Expr atom() {
    if (s_.accept('-')) return -atom();
    Complex c;
    if (s_.paren_complex(c)) return Expr::constant(c);
    if (s_.accept('(')) {
      Expr e = expr();
      s_.expect(')', "')'");
      return e;
    }
    if (s_.starts_number()) {
      const double x = s_.number();
      if (s_.accept('i')) return Expr::constant({0.0, x});
      return Expr::constant(x);
    }
    if (s_.keyword("exp")) return exp(call_arg());
    if (s_.keyword("sin")) return sin(call_arg());
    if (s_.keyword("cos")) return cos(call_arg());
    if (s_.keyword("z")) return Expr::z();
    s_.fail("expected z, a number, exp/sin/cos or '('");
  }
  Expr call_arg() {
    s_.expect('(', "'(' after function name");
    Expr e = expr();
    s_.expect(')', "')'");
    return e;
  }

  Scanner s_;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

// ---------------------------------------------------------------------------
// Symbolic derivative (the grammar is closed under d/dz).

namespace detail {

inline bool is_zero(const Expr& e) { return e.is_constant(0.0); }
inline bool is_one(const Expr& e) { return e.is_constant(1.0); }

inline Expr mul_s(const Expr& a, const Expr& b) {
  if (is_zero(a) || is_zero(b)) return Expr::constant(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant) return Expr::constant(a.value() * b.value());
  return a * b;
}
inline Expr add_s(const Expr& a, const Expr& b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return a + b;
}
inline Expr sub_s(const Expr& a, const Expr& b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return -b;
  return a - b;
}
inline Expr neg_s(const Expr& a) {
  if (is_zero(a)) return a;
  return -a;
}

}  // namespace detail

inline Expr derivative(const Expr& e) {
  using detail::add_s;
  using detail::mul_s;
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant: return Expr::constant(0.0);
    case K::Var: return Expr::constant(1.0);
    case K::Add: return add_s(derivative(e.lhs()), derivative(e.rhs()));
    case K::Sub: return detail::sub_s(derivative(e.lhs()), derivative(e.rhs()));
    case K::Mul:
      return add_s(mul_s(derivative(e.lhs()), e.rhs()), mul_s(e.lhs(), derivative(e.rhs())));
    case K::Pow: {
      const unsigned n = e.exponent();
      if (n == 0) return Expr::constant(0.0);
      const Expr inner = n == 1 ? Expr::constant(1.0) : (n == 2 ? e.lhs() : pow(e.lhs(), n - 1));
      return mul_s(mul_s(Expr::constant(static_cast<double>(n)), inner), derivative(e.lhs()));
    }
    case K::Exp: return mul_s(e, derivative(e.lhs()));
    case K::Sin: return mul_s(cos(e.lhs()), derivative(e.lhs()));
    case K::Cos: return detail::neg_s(mul_s(sin(e.lhs()), derivative(e.lhs())));
    case K::Neg: return detail::neg_s(derivative(e.lhs()));
  }
  return Expr::constant(0.0);
}

inline Expr derivative(const Expr& e, int order) {
  Expr d = e;
  for (int i = 0; i < order; ++i) d = derivative(d);
  return d;
}

// ---------------------------------------------------------------------------
// Structural factor cancellation for quotients a/b. Only factors that are
// syntactically identical are removed, so the quotient's value never changes.

namespace detail {

struct Factored {
  std::vector<Expr> factors;  // non-constant multiplicative factors
  Expr rest;                  // what is left
};

inline Expr product(const std::vector<Expr>& fs, Expr acc) {
  for (const Expr& f : fs) acc = mul_s(acc, f);
  return acc;
}

// Removes the elements of `common` from `fs` (one copy each).
inline std::vector<Expr> minus(std::vector<Expr> fs, const std::vector<Expr>& common) {
  for (const Expr& c : common) {
    auto it = std::find(fs.begin(), fs.end(), c);
    if (it != fs.end()) fs.erase(it);
  }
  return fs;
}

inline std::vector<Expr> intersect(const std::vector<Expr>& a, std::vector<Expr> b) {
  std::vector<Expr> out;
  for (const Expr& x : a) {
    auto it = std::find(b.begin(), b.end(), x);
    if (it != b.end()) {
      out.push_back(x);
      b.erase(it);
    }
  }
  return out;
}

inline Factored factor_out(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Mul: {
      Factored l = factor_out(e.lhs()), r = factor_out(e.rhs());
      l.factors.insert(l.factors.end(), r.factors.begin(), r.factors.end());
      return {l.factors, mul_s(l.rest, r.rest)};
    }
    case K::Pow: {
      Factored b = factor_out(e.lhs());
      Factored out{{}, Expr::constant(1.0)};
      for (unsigned i = 0; i < e.exponent(); ++i) {
        out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
        out.rest = mul_s(out.rest, b.rest);
      }
      return out;
    }
    case K::Neg: {
      Factored c = factor_out(e.lhs());
      return {c.factors, neg_s(c.rest)};
    }
    case K::Add:
    case K::Sub: {
      Factored l = factor_out(e.lhs()), r = factor_out(e.rhs());
      const std::vector<Expr> common = intersect(l.factors, r.factors);
      if (common.empty()) return {{e}, Expr::constant(1.0)};
      const Expr a = product(minus(l.factors, common), l.rest);
      const Expr b = product(minus(r.factors, common), r.rest);
      return {common, e.kind() == K::Add ? add_s(a, b) : sub_s(a, b)};
    }
    case K::Constant: return {{}, e};
    default: return {{e}, Expr::constant(1.0)};
  }
}

}  // namespace detail

// a/b with structurally common factors removed from both.
inline std::pair<Expr, Expr> cancel_common_factors(const Expr& a, const Expr& b) {
  const detail::Factored fa = detail::factor_out(a), fb = detail::factor_out(b);
  const std::vector<Expr> common = detail::intersect(fa.factors, fb.factors);
  if (common.empty()) return {a, b};
  return {detail::product(detail::minus(fa.factors, common), fa.rest),
          detail::product(detail::minus(fb.factors, common), fb.rest)};
}

// ---------------------------------------------------------------------------
// Evaluation: the expression DAG is flattened once into a tape of unique nodes
// in dependency order, then evaluated with truncated-Taylor arithmetic.

class Tape {
 public:
  explicit Tape(const Expr& e) {
    std::unordered_map<const Expr::Node*, int> index;
    root_ = visit(e, index);
  }

  ScaledSeries evaluate(Complex z, int order) const {
    std::vector<ScaledSeries> reg(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op& op = ops_[i];
      switch (op.kind) {
        case Expr::Kind::Constant: reg[i] = ScaledSeries::constant(op.value, order); break;
        case Expr::Kind::Var: reg[i] = ScaledSeries::variable(z, order); break;
        case Expr::Kind::Add: reg[i] = reg[op.a] + reg[op.b]; break;
        case Expr::Kind::Sub: reg[i] = reg[op.a] - reg[op.b]; break;
        case Expr::Kind::Mul: reg[i] = reg[op.a] * reg[op.b]; break;
        case Expr::Kind::Pow: reg[i] = pow(reg[op.a], op.exponent); break;
        case Expr::Kind::Exp: reg[i] = exp(reg[op.a]); break;
        case Expr::Kind::Sin: reg[i] = sin_cos(reg[op.a]).first; break;
        case Expr::Kind::Cos: reg[i] = sin_cos(reg[op.a]).second; break;
        case Expr::Kind::Neg: reg[i] = -reg[op.a]; break;
      }
    }
    return std::move(reg[root_]);
  }

  std::size_t size() const { return ops_.size(); }

 private:
  struct Op {
    Expr::Kind kind;
    Complex value;
    unsigned exponent;
    int a;
    int b;
  };

  int visit(const Expr& e, std::unordered_map<const Expr::Node*, int>& index) {
    if (auto it = index.find(e.node()); it != index.end()) return it->second;
    int a = -1;
    int b = -1;
    if (e.node()->lhs) a = visit(e.lhs(), index);
    if (e.node()->rhs) b = visit(e.rhs(), index);
    ops_.push_back(Op{e.kind(), e.value(), e.exponent(), a, b});
    const int id = static_cast<int>(ops_.size()) - 1;
    index.emplace(e.node(), id);
    return id;
  }

  std::vector<Op> ops_;
  int root_ = 0;
};

inline constexpr int kMaxJetOrder = 32;

// Derivative values f^(j)(center), j = 0..order.
struct Jet {
  Complex center;
  int order = 0;
  std::vector<Complex> derivs;
};

inline Jet eval_jet(const Expr& e, Complex z, int order) {
  if (order < 0 || order > kMaxJetOrder) throw InputError("jet order must lie in [0, " + std::to_string(kMaxJetOrder) + "]");
  const ScaledSeries s = Tape(e).evaluate(z, order);
  Jet j{z, order, {}};
  j.derivs.reserve(order + 1);
  for (int k = 0; k <= order; ++k) j.derivs.push_back(s.derivative(k));
  return j;
}

inline Complex eval(const Expr& e, Complex z) { return eval_jet(e, z, 0).derivs[0]; }

// ---------------------------------------------------------------------------
// EntireFunction: a type-erased jet-evaluable function. Built from an
// expression (compiled once) or from any callable producing Taylor series.

class EntireFunction {
 public:
  using SeriesFn = std::function<ScaledSeries(Complex, int)>;

  EntireFunction() = default;
  explicit EntireFunction(const Expr& e) : expr_(std::make_shared<Expr>(e)) {
    auto tape = std::make_shared<const Tape>(e);
    fn_ = std::make_shared<const SeriesFn>([tape](Complex z, int order) { return tape->evaluate(z, order); });
  }
  explicit EntireFunction(SeriesFn fn) : fn_(std::make_shared<const SeriesFn>(std::move(fn))) {}

  ScaledSeries taylor(Complex z, int order) const { return (*fn_)(z, order); }

  double log_abs(Complex z) const { return taylor(z, 0).log_abs(0); }

  // Expression form when the function came from one.
  const Expr* expr() const { return expr_.get(); }

 private:
  std::shared_ptr<const SeriesFn> fn_;
  std::shared_ptr<const Expr> expr_;
};

}  // namespace nevang
