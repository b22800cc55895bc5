#include "affective/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace affective::expr {

namespace {

bool is_unary(Op op) {
  switch (op) {
    case Op::Neg:
    case Op::Sqrt:
    case Op::Exp:
    case Op::Log:
    case Op::Sin:
    case Op::Cos:
      return true;
    default:
      return false;
  }
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    default: return "";
  }
}

bool lookup_function(std::string_view name, Op& op) {
  static constexpr std::pair<std::string_view, Op> kFunctions[] = {
      {"sqrt", Op::Sqrt}, {"exp", Op::Exp}, {"log", Op::Log},
      {"sin", Op::Sin},   {"cos", Op::Cos},
  };
  for (const auto& [fname, fop] : kFunctions) {
    if (fname == name) {
      op = fop;
      return true;
    }
  }
  return false;
}

Expr make(Op op, double value, std::string name, std::vector<Expr> args) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->value = value;
  node->name = std::move(name);
  node->args = std::move(args);
  return Expr(std::move(node));
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

// Applies an operator to already evaluated arguments, checking its domain.
double apply_unary(Op op, double a, const Expr& at) {
  switch (op) {
    case Op::Neg:
      return -a;
    case Op::Sqrt:
      if (a < 0.0) throw EvalError("domain error: sqrt of negative value in " + to_string(at));
      return std::sqrt(a);
    case Op::Exp:
      return std::exp(a);
    case Op::Log:
      if (!(a > 0.0)) throw EvalError("domain error: log of non-positive value in " + to_string(at));
      return std::log(a);
    case Op::Sin:
      return std::sin(a);
    case Op::Cos:
      return std::cos(a);
    default:
      throw EvalError("malformed expression node");
  }
}

double apply_binary(Op op, double a, double b, const Expr& at) {
  switch (op) {
    case Op::Add:
      return a + b;
    case Op::Sub:
      return a - b;
    case Op::Mul:
      return a * b;
    case Op::Div:
      if (b == 0.0) throw EvalError("domain error: division by zero in " + to_string(at));
      return a / b;
    case Op::Pow:
      if (a < 0.0 && !is_integer(b))
        throw EvalError("domain error: fractional power of negative value in " + to_string(at));
      if (a == 0.0 && b < 0.0)
        throw EvalError("domain error: negative power of zero in " + to_string(at));
      return std::pow(a, b);
    default:
      throw EvalError("malformed expression node");
  }
}

bool foldable_unary(Op op, double a) {
  if (op == Op::Sqrt) return a >= 0.0;
  if (op == Op::Log) return a > 0.0;
  return true;
}

bool foldable_binary(Op op, double a, double b) {
  if (op == Op::Div) return b != 0.0;
  if (op == Op::Pow) return !(a < 0.0 && !is_integer(b)) && !(a == 0.0 && b < 0.0);
  return true;
}

template <typename Lookup>
double eval_impl(const Expr& e, const Lookup& lookup) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Constant:
      return n.value;
    case Op::Variable:
      return lookup(n);
    default:
      break;
  }
  if (is_unary(n.op)) return apply_unary(n.op, eval_impl(n.args[0], lookup), e);
  const double a = eval_impl(n.args[0], lookup);
  const double b = eval_impl(n.args[1], lookup);
  return apply_binary(n.op, a, b, e);
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_expr();
    skip_space();
    if (pos_ < text_.size())
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
            text_[pos_] == '\n'))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size())
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Op::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = binary(Op::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = binary(Op::Mul, lhs, parse_factor());
      else if (accept('/'))
        lhs = binary(Op::Div, lhs, parse_factor());
      else
        return lhs;
    }
  }

  // Unary minus is handled here rather than in parse_base so that the
  // exponent binds tighter: -x^2 == -(x^2).
  Expr parse_factor() {
    if (accept('-')) return unary(Op::Neg, parse_factor());
    Expr base = parse_base();
    if (accept('^')) {
      skip_space();
      const std::size_t at = pos_;
      Expr exponent = parse_factor();
      if (!exponent.is_constant()) throw ParseError("exponent must be a constant", at);
      return binary(Op::Pow, base, exponent);
    }
    return base;
  }

  Expr parse_base() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view ident = text_.substr(start, pos_ - start);
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        Op fop{};
        if (!lookup_function(ident, fop))
          throw ParseError("unknown function '" + std::string(ident) + "'", start);
        ++pos_;
        Expr arg = parse_expr();
        expect(')');
        return unary(fop, arg);
      }
      return variable(std::string(ident));
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return constant(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print(const Expr& e, std::string& out) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      if (n.value < 0.0 || std::signbit(n.value)) {
        out += "(-";
        std::snprintf(buf, sizeof buf, "%.17g", -n.value);
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case Op::Variable:
      out += n.name;
      return;
    case Op::Neg:
      out += "(-";
      print(n.args[0], out);
      out += ')';
      return;
    default:
      break;
  }
  if (is_unary(n.op)) {
    out += function_name(n.op);
    out += '(';
    print(n.args[0], out);
    out += ')';
    return;
  }
  static constexpr char kSymbols[] = {'+', '-', '*', '/', '^'};
  const char sym = kSymbols[static_cast<int>(n.op) - static_cast<int>(Op::Add)];
  out += '(';
  print(n.args[0], out);
  out += sym;
  print(n.args[1], out);
  out += ')';
}

void collect_variables(const Expr& e, std::set<std::string, std::less<>>& out) {
  if (e.op() == Op::Variable) {
    out.insert(e->name);
    return;
  }
  for (const Expr& a : e->args) collect_variables(a, out);
}

}  // namespace

// ---------------------------------------------------------------------------

Op Expr::op() const { return node_->op; }
bool Expr::is_constant() const { return node_->op == Op::Constant; }
bool Expr::is_zero() const { return is_constant() && node_->value == 0.0; }
double Expr::constant_value() const { return node_->value; }

Expr constant(double value) { return make(Op::Constant, value, {}, {}); }

Expr variable(std::string name) { return make(Op::Variable, 0.0, std::move(name), {}); }

Expr unary(Op op, Expr arg) {
  if (!is_unary(op)) throw std::invalid_argument("unary(): not a unary operator");
  if (arg.is_constant() && foldable_unary(op, arg.constant_value()))
    return constant(apply_unary(op, arg.constant_value(), arg));
  if (op == Op::Neg && arg.op() == Op::Neg) return arg->args[0];
  return make(op, 0.0, {}, {std::move(arg)});
}

Expr binary(Op op, Expr lhs, Expr rhs) {
  if (is_unary(op) || op == Op::Constant || op == Op::Variable)
    throw std::invalid_argument("binary(): not a binary operator");
  if (op == Op::Pow && !rhs.is_constant())
    throw std::invalid_argument("binary(): exponent must be a constant");
  if (lhs.is_constant() && rhs.is_constant() &&
      foldable_binary(op, lhs.constant_value(), rhs.constant_value()))
    return constant(apply_binary(op, lhs.constant_value(), rhs.constant_value(), lhs));
  switch (op) {
    case Op::Add:
      if (lhs.is_zero()) return rhs;
      if (rhs.is_zero()) return lhs;
      break;
    case Op::Sub:
      if (rhs.is_zero()) return lhs;
      if (lhs.is_zero()) return unary(Op::Neg, rhs);
      break;
    case Op::Mul:
      if (lhs.is_zero() || rhs.is_zero()) return constant(0.0);
      if (lhs.is_constant() && lhs.constant_value() == 1.0) return rhs;
      if (rhs.is_constant() && rhs.constant_value() == 1.0) return lhs;
      break;
    case Op::Div:
      if (lhs.is_zero()) return constant(0.0);
      if (rhs.is_constant() && rhs.constant_value() == 1.0) return lhs;
      break;
    case Op::Pow:
      if (rhs.constant_value() == 1.0) return lhs;
      if (rhs.constant_value() == 0.0) return constant(1.0);
      break;
    default:
      break;
  }
  return make(op, 0.0, {}, {std::move(lhs), std::move(rhs)});
}

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

double eval(const Expr& e, const Env& env) {
  return eval_impl(e, [&](const Node& n) {
    auto it = env.find(n.name);
    if (it == env.end()) throw EvalError("unbound variable '" + n.name + "'");
    return it->second;
  });
}

double eval(const Expr& e, std::span<const double> slots) {
  return eval_impl(e, [&](const Node& n) {
    if (n.slot < 0 || static_cast<std::size_t>(n.slot) >= slots.size())
      throw EvalError("unbound variable '" + n.name + "'");
    return slots[static_cast<std::size_t>(n.slot)];
  });
}

Expr differentiate(const Expr& e, std::string_view var) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Constant:
      return constant(0.0);
    case Op::Variable:
      return constant(n.name == var ? 1.0 : 0.0);
    default:
      break;
  }
  const Expr& a = n.args[0];
  const Expr da = differentiate(a, var);
  switch (n.op) {
    case Op::Neg:
      return unary(Op::Neg, da);
    case Op::Sqrt:
      return binary(Op::Div, da, binary(Op::Mul, constant(2.0), e));
    case Op::Exp:
      return binary(Op::Mul, da, e);
    case Op::Log:
      return binary(Op::Div, da, a);
    case Op::Sin:
      return binary(Op::Mul, da, unary(Op::Cos, a));
    case Op::Cos:
      return unary(Op::Neg, binary(Op::Mul, da, unary(Op::Sin, a)));
    default:
      break;
  }
  const Expr& b = n.args[1];
  switch (n.op) {
    case Op::Add:
      return binary(Op::Add, da, differentiate(b, var));
    case Op::Sub:
      return binary(Op::Sub, da, differentiate(b, var));
    case Op::Mul:
      return binary(Op::Add, binary(Op::Mul, da, b), binary(Op::Mul, a, differentiate(b, var)));
    case Op::Div: {
      const Expr db = differentiate(b, var);
      const Expr num = binary(Op::Sub, binary(Op::Mul, da, b), binary(Op::Mul, a, db));
      return binary(Op::Div, num, binary(Op::Mul, b, b));
    }
    case Op::Pow: {
      const double c = b.constant_value();
      const Expr power = binary(Op::Pow, a, constant(c - 1.0));
      return binary(Op::Mul, binary(Op::Mul, constant(c), power), da);
    }
    default:
      throw EvalError("malformed expression node");
  }
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::set<std::string, std::less<>> free_variables(const Expr& e) {
  std::set<std::string, std::less<>> out;
  collect_variables(e, out);
  return out;
}

Expr substitute(const Expr& e, const Env& values) {
  const Node& n = e.node();
  if (n.op == Op::Constant) return e;
  if (n.op == Op::Variable) {
    auto it = values.find(n.name);
    return it == values.end() ? e : constant(it->second);
  }
  if (is_unary(n.op)) return unary(n.op, substitute(n.args[0], values));
  return binary(n.op, substitute(n.args[0], values), substitute(n.args[1], values));
}

Expr bind_slots(const Expr& e, std::span<const std::string> names) {
  const Node& n = e.node();
  if (n.op == Op::Constant) return e;
  if (n.op == Op::Variable) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == n.name) {
        auto node = std::make_shared<Node>(n);
        node->slot = static_cast<int>(k);
        return Expr(std::move(node));
      }
    }
    throw EvalError("unbound variable '" + n.name + "'");
  }
  auto node = std::make_shared<Node>(n);
  for (Expr& arg : node->args) arg = bind_slots(arg, names);
  return Expr(std::move(node));
}

}  // namespace affective::expr
