#pragma once

// Smooth utility expressions: parsing, evaluation and exact symbolic
// differentiation.
//
// Grammar (whitespace insignificant):
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" factor)?
//   base   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")" | "-" base
//
// Unary minus binds looser than "^", so "-x^2" reads as -(x^2). The exponent
// of "^" must be free of identifiers. Recognised functions are sqrt, exp,
// log, sin and cos.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace affective::expr {

enum class Op {
  Constant,
  Variable,
  Neg,
  Sqrt,
  Exp,
  Log,
  Sin,
  Cos,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

struct Node;

/// Immutable expression tree handle. Copies share structure.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  const Node* operator->() const { return node_.get(); }
  explicit operator bool() const { return static_cast<bool>(node_); }

  Op op() const;
  /// True for a constant node (after folding, any variable-free tree is one).
  bool is_constant() const;
  bool is_zero() const;
  double constant_value() const;

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Constant;
  double value = 0.0;      // Constant
  std::string name;        // Variable
  int slot = -1;           // Variable, after bind_slots()
  std::vector<Expr> args;  // 1 for unary ops, 2 for binary ops
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Env = std::map<std::string, double, std::less<>>;

// Node constructors. These fold constants and drop additive zeros and
// multiplicative ones, so the derivative of an expression that does not
// mention a variable is exactly the zero constant.
Expr constant(double value);
Expr variable(std::string name);
Expr unary(Op op, Expr arg);
Expr binary(Op op, Expr lhs, Expr rhs);

Expr parse(std::string_view text);

double eval(const Expr& e, const Env& env);

/// Evaluates a tree whose variables were resolved with bind_slots().
double eval(const Expr& e, std::span<const double> slots);

Expr differentiate(const Expr& e, std::string_view var);

/// Fully parenthesised text that parses back to an equal function.
std::string to_string(const Expr& e);

std::set<std::string, std::less<>> free_variables(const Expr& e);

/// Replaces every variable named in `values` by a constant.
Expr substitute(const Expr& e, const Env& values);

/// Returns a copy whose variables carry an index into `names`.
/// Throws EvalError for a variable missing from `names`.
Expr bind_slots(const Expr& e, std::span<const std::string> names);

}  // namespace affective::expr
