// Tiny closed-form expression engine for user-defined maps: parse a formula
// in r, theta, eps (sin, cos, + - * /, integer powers, pi), evaluate it, and
// differentiate it symbolically. The iteration schemes need true partial
// derivatives, so user maps are differentiated on the parse tree instead of
// numerically.
#pragma once

#include <memory>
#include <string>

namespace qpfc {

enum class ExprVar { R, Theta, Eps };

class Expression {
 public:
  /// Grammar:
  ///   expr   := term (('+'|'-') term)*
  ///   term   := unary (('*'|'/') unary)*
  ///   unary  := '-' unary | power
  ///   power  := atom ('^' integer)?
  ///   atom   := number | 'pi' | 'r' | 'theta' | 'eps'
  ///           | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
  static Expression parse(const std::string& text);

  double eval(double r, double theta, double eps) const;
  Expression differentiate(ExprVar v) const;
  std::string str() const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
};

}  // namespace qpfc
