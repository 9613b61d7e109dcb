#include "qpfc/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {
enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
}

struct Expression::Node {
  Kind kind;
  double value = 0.0;     // Num
  ExprVar var = ExprVar::R;  // Var
  int exponent = 1;       // Pow
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr num(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Num;
  n->value = v;
  return n;
}

NodePtr var(ExprVar v) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Var;
  n->var = v;
  return n;
}

bool is_num(const NodePtr& n, double v) {
  return n->kind == Kind::Num && n->value == v;
}

NodePtr unary(Kind k, NodePtr a) {
  if (a->kind == Kind::Num) {
    switch (k) {
      case Kind::Neg: return num(-a->value);
      case Kind::Sin: return num(std::sin(a->value));
      case Kind::Cos: return num(std::cos(a->value));
      case Kind::Exp: return num(std::exp(a->value));
      default: break;
    }
  }
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr binary(Kind k, NodePtr a, NodePtr b) {
  if (a->kind == Kind::Num && b->kind == Kind::Num) {
    switch (k) {
      case Kind::Add: return num(a->value + b->value);
      case Kind::Sub: return num(a->value - b->value);
      case Kind::Mul: return num(a->value * b->value);
      case Kind::Div: return num(a->value / b->value);
      default: break;
    }
  }
  // Identity folding keeps derivative trees small.
  if (k == Kind::Add) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
  }
  if (k == Kind::Sub && is_num(b, 0.0)) return a;
  if (k == Kind::Mul) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
  }
  if (k == Kind::Div && is_num(a, 0.0)) return num(0.0);
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr power(NodePtr base, int e) {
  if (e == 0) return num(1.0);
  if (e == 1) return base;
  if (base->kind == Kind::Num) return num(std::pow(base->value, e));
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Pow;
  n->exponent = e;
  n->a = std::move(base);
  return n;
}

double eval_node(const Expression::Node& n, double r, double theta, double eps) {
  switch (n.kind) {
    case Kind::Num: return n.value;
    case Kind::Var:
      switch (n.var) {
        case ExprVar::R: return r;
        case ExprVar::Theta: return theta;
        case ExprVar::Eps: return eps;
      }
      return 0.0;
    case Kind::Add: return eval_node(*n.a, r, theta, eps) + eval_node(*n.b, r, theta, eps);
    case Kind::Sub: return eval_node(*n.a, r, theta, eps) - eval_node(*n.b, r, theta, eps);
    case Kind::Mul: return eval_node(*n.a, r, theta, eps) * eval_node(*n.b, r, theta, eps);
    case Kind::Div: return eval_node(*n.a, r, theta, eps) / eval_node(*n.b, r, theta, eps);
    case Kind::Pow: return std::pow(eval_node(*n.a, r, theta, eps), n.exponent);
    case Kind::Neg: return -eval_node(*n.a, r, theta, eps);
    case Kind::Sin: return std::sin(eval_node(*n.a, r, theta, eps));
    case Kind::Cos: return std::cos(eval_node(*n.a, r, theta, eps));
    case Kind::Exp: return std::exp(eval_node(*n.a, r, theta, eps));
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, ExprVar v) {
  switch (n->kind) {
    case Kind::Num: return num(0.0);
    case Kind::Var: return num(n->var == v ? 1.0 : 0.0);
    case Kind::Add: return binary(Kind::Add, diff_node(n->a, v), diff_node(n->b, v));
    case Kind::Sub: return binary(Kind::Sub, diff_node(n->a, v), diff_node(n->b, v));
    case Kind::Mul:
      return binary(Kind::Add, binary(Kind::Mul, diff_node(n->a, v), n->b),
                    binary(Kind::Mul, n->a, diff_node(n->b, v)));
    case Kind::Div:
      // (a/b)' = a'/b - a b'/b^2
      return binary(Kind::Sub, binary(Kind::Div, diff_node(n->a, v), n->b),
                    binary(Kind::Div, binary(Kind::Mul, n->a, diff_node(n->b, v)),
                           power(n->b, 2)));
    case Kind::Pow:
      return binary(Kind::Mul,
                    binary(Kind::Mul, num(n->exponent), power(n->a, n->exponent - 1)),
                    diff_node(n->a, v));
    case Kind::Neg: return unary(Kind::Neg, diff_node(n->a, v));
    case Kind::Sin:
      return binary(Kind::Mul, unary(Kind::Cos, n->a), diff_node(n->a, v));
    case Kind::Cos:
      return binary(Kind::Mul, unary(Kind::Neg, unary(Kind::Sin, n->a)),
                    diff_node(n->a, v));
    case Kind::Exp:
      return binary(Kind::Mul, unary(Kind::Exp, n->a), diff_node(n->a, v));
  }
  return num(0.0);
}

void print_node(const Expression::Node& n, std::ostream& os) {
  switch (n.kind) {
    case Kind::Num: os << n.value; return;
    case Kind::Var:
      os << (n.var == ExprVar::R ? "r" : n.var == ExprVar::Theta ? "theta" : "eps");
      return;
    case Kind::Add: os << "("; print_node(*n.a, os); os << " + "; print_node(*n.b, os); os << ")"; return;
    case Kind::Sub: os << "("; print_node(*n.a, os); os << " - "; print_node(*n.b, os); os << ")"; return;
    case Kind::Mul: os << "("; print_node(*n.a, os); os << "*"; print_node(*n.b, os); os << ")"; return;
    case Kind::Div: os << "("; print_node(*n.a, os); os << "/"; print_node(*n.b, os); os << ")"; return;
    case Kind::Pow: print_node(*n.a, os); os << "^" << n.exponent; return;
    case Kind::Neg: os << "(-"; print_node(*n.a, os); os << ")"; return;
    case Kind::Sin: os << "sin("; print_node(*n.a, os); os << ")"; return;
    case Kind::Cos: os << "cos("; print_node(*n.a, os); os << ")"; return;
    case Kind::Exp: os << "exp("; print_node(*n.a, os); os << ")"; return;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw PreconditionError("expression: " + msg + " at position " +
                            std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr e = term();
    while (true) {
      if (consume('+')) e = binary(Kind::Add, e, term());
      else if (consume('-')) e = binary(Kind::Sub, e, term());
      else return e;
    }
  }

  NodePtr term() {
    NodePtr e = unary_expr();
    while (true) {
      if (consume('*')) e = binary(Kind::Mul, e, unary_expr());
      else if (consume('/')) e = binary(Kind::Div, e, unary_expr());
      else return e;
    }
  }

  NodePtr unary_expr() {
    if (consume('-')) return unary(Kind::Neg, unary_expr());
    return power_expr();
  }

  NodePtr power_expr() {
    NodePtr base = atom();
    if (consume('^')) {
      skip_ws();
      bool neg = consume('-');
      size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected integer exponent");
      const int e = std::stoi(text_.substr(start, pos_ - start));
      return power(std::move(base), neg ? -e : e);
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (consume('(')) {
      NodePtr e = expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      const double v = std::stod(text_.substr(pos_), &used);
      pos_ += used;
      return num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string word = text_.substr(start, pos_ - start);
      if (word == "pi") return num(std::numbers::pi);
      if (word == "r") return var(ExprVar::R);
      if (word == "theta") return var(ExprVar::Theta);
      if (word == "eps") return var(ExprVar::Eps);
      if (word == "sin" || word == "cos" || word == "exp") {
        if (!consume('(')) fail("expected '(' after " + word);
        NodePtr a = expr();
        if (!consume(')')) fail("expected ')'");
        return unary(word == "sin" ? Kind::Sin : word == "cos" ? Kind::Cos : Kind::Exp,
                     std::move(a));
      }
      fail("unknown identifier '" + word + "'");
    }
    fail("expected value");
  }
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expression Expression::parse(const std::string& text) {
  return Expression(Parser(text).run());
}

double Expression::eval(double r, double theta, double eps) const {
  return eval_node(*root_, r, theta, eps);
}

Expression Expression::differentiate(ExprVar v) const {
  return Expression(diff_node(root_, v));
}

std::string Expression::str() const {
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

}  // namespace qpfc
