#include "swarmsync/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <utility>

namespace swarmsync {

namespace {

struct Const final : Expr {
  double v;
  explicit Const(double v) : v(v) {}
  double eval(const AgentState&, double) const override { return v; }
};

struct TimeVar final : Expr {
  double eval(const AgentState&, double t) const override { return t; }
};

struct StateVar final : Expr {
  int order, comp;
  StateVar(int k, int d) : order(k), comp(d) {}
  double eval(const AgentState& x, double) const override {
    return x.component(order, comp);
  }
};

struct Neg final : Expr {
  ExprPtr a;
  explicit Neg(ExprPtr a) : a(std::move(a)) {}
  double eval(const AgentState& x, double t) const override { return -a->eval(x, t); }
};

struct Binary final : Expr {
  char op;
  ExprPtr a, b;
  Binary(char op, ExprPtr a, ExprPtr b) : op(op), a(std::move(a)), b(std::move(b)) {}
  double eval(const AgentState& x, double t) const override {
    const double u = a->eval(x, t), v = b->eval(x, t);
    switch (op) {
      case '+': return u + v;
      case '-': return u - v;
      case '*': return u * v;
      case '/': return u / v;
      default: return std::pow(u, v);
    }
  }
};

struct Call final : Expr {
  double (*fn)(double);
  ExprPtr a;
  Call(double (*fn)(double), ExprPtr a) : fn(fn), a(std::move(a)) {}
  double eval(const AgentState& x, double t) const override { return fn(a->eval(x, t)); }
};

class Parser {
public:
  Parser(const std::string& src, StateDims dims) : src_(src), dims_(dims) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression, offset " + std::to_string(pos_) + ": " + what +
                     " in \"" + src_ + "\"");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (accept('+')) e = std::make_shared<Binary>('+', e, term());
      else if (accept('-')) e = std::make_shared<Binary>('-', e, term());
      else return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      if (accept('*')) e = std::make_shared<Binary>('*', e, unary());
      else if (accept('/')) e = std::make_shared<Binary>('/', e, unary());
      else return e;
    }
  }

  ExprPtr unary() {
    if (accept('-')) return std::make_shared<Neg>(unary());
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (accept('^')) return std::make_shared<Binary>('^', base, unary());
    return base;
  }

  int integer() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected integer index");
    return std::stoi(src_.substr(start, pos_ - start));
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(src_.substr(pos_), &used);
      pos_ += used;
      return std::make_shared<Const>(v);
    }
    if (accept('(')) {
      ExprPtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "t") return std::make_shared<TimeVar>();
      if (name == "x") {
        expect('[');
        const int k = integer();
        expect(']');
        expect('[');
        const int d = integer();
        expect(']');
        if (k < 1 || k > dims_.n || d < 1 || d > dims_.p)
          fail("state reference x[" + std::to_string(k) + "][" + std::to_string(d) +
               "] outside (n=" + std::to_string(dims_.n) + ", p=" + std::to_string(dims_.p) + ")");
        return std::make_shared<StateVar>(k, d);
      }
      double (*fn)(double) = nullptr;
      if (name == "sin") fn = std::sin;
      else if (name == "cos") fn = std::cos;
      else if (name == "exp") fn = std::exp;
      else fail("unknown identifier '" + name + "'");
      expect('(');
      ExprPtr arg = expr();
      expect(')');
      return std::make_shared<Call>(fn, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& src_;
  StateDims dims_;
  size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(const std::string& source, StateDims dims) {
  return Parser(source, dims).parse();
}

}  // namespace swarmsync
