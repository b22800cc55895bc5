#pragma once

// Purely affective interaction models V_i(x_i, u_{-i}) loaded from the
// line-oriented model file format:
//
//   players: <int>
//   param <name>: <real>
//   var <i>: <ident> in (<lo>, <hi>)
//   utility <i>: <expression>
//
// '#' starts a comment. Utility i may reference its own action variable,
// the utility levels u_j of the other players, and parameters.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "affective/expr.hpp"
#include "affective/linalg.hpp"

namespace affective {

inline constexpr std::size_t kMaxPlayers = 12;

class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ActionVariable {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

/// Half-width used for unbounded sides when a finite search window is needed.
inline constexpr double kUnboundedWindow = 10.0;

class InteractionModel {
 public:
  static InteractionModel load(std::string_view document);

  std::size_t players() const { return actions_.size(); }
  const std::vector<ActionVariable>& actions() const { return actions_; }
  const std::map<std::string, double, std::less<>>& params() const { return params_; }
  /// Utility of player i with parameters substituted.
  const expr::Expr& utility(std::size_t i) const { return utilities_[i]; }
  const std::string& source() const { return source_; }

  /// Strict interior inset of player i's open interval: lo + eps, hi - eps
  /// with eps = 1e-6 (hi - lo), or 1e-6 when a side is unbounded.
  double inset_lo(std::size_t i) const;
  double inset_hi(std::size_t i) const;
  /// Finite window for grids and samplers: the inset, with unbounded sides
  /// replaced by a span of 2 * kUnboundedWindow from the finite side, or by
  /// [-kUnboundedWindow, kUnboundedWindow] when both sides are unbounded.
  double window_lo(std::size_t i) const;
  double window_hi(std::size_t i) const;
  bool interior(const Vector& x) const;
  Vector clamp_to_inset(const Vector& x) const;
  Vector window_midpoint() const;

  Vector evaluate_v(const Vector& x, const Vector& u) const;
  /// F_x(u) = u - V_x(u).
  Vector residual(const Vector& x, const Vector& u) const;
  /// J_ij = dV_i/du_j at (x, u); the diagonal is exactly zero.
  Matrix affection_jacobian(const Vector& x, const Vector& u) const;

  double utility_value(std::size_t i, const Vector& x, const Vector& u) const;
  /// dV_i/dx_i at (x_i, u_{-i}).
  double own_partial(std::size_t i, const Vector& x, const Vector& u) const;
  /// d2V_i/dx_i2.
  double own_second(std::size_t i, const Vector& x, const Vector& u) const;
  /// d2V_i/dx_i du_j.
  double cross_partial(std::size_t i, std::size_t j, const Vector& x, const Vector& u) const;
  Vector own_partials(const Vector& x, const Vector& u) const;

  const expr::Expr& own_partial_expr(std::size_t i) const { return own_partial_[i]; }
  const expr::Expr& affection_expr(std::size_t i, std::size_t j) const {
    return affection_[i * players() + j];
  }

  /// Every dV_i/du_j is a constant expression (second derivatives vanish
  /// identically), i.e. V_i = f_i(x_i) + sum_j a_ij u_j.
  bool linearly_separable() const { return separable_; }
  /// f_i: utility i with every u_j set to zero.
  const expr::Expr& base_utility(std::size_t i) const { return base_[i]; }

  /// Names of the evaluation slots: actions first, then u1..un.
  const std::vector<std::string>& slot_names() const { return slot_names_; }

 private:
  InteractionModel() = default;
  void build_derivatives();
  std::vector<double> slots(const Vector& x, const Vector& u) const;

  std::string source_;
  std::vector<ActionVariable> actions_;
  std::map<std::string, double, std::less<>> params_;
  std::vector<expr::Expr> utilities_;
  std::vector<std::string> slot_names_;

  // Slot-bound derivative trees.
  std::vector<expr::Expr> bound_utilities_;
  std::vector<expr::Expr> own_partial_;
  std::vector<expr::Expr> own_second_;
  std::vector<expr::Expr> affection_;  // n x n, row-major
  std::vector<expr::Expr> cross_;      // n x n, d2V_i/dx_i du_j
  std::vector<expr::Expr> base_;
  bool separable_ = false;
};

/// Reads a model from a file path.
InteractionModel load_model_file(const std::string& path);

}  // namespace affective
