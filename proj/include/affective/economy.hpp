#pragma once

// Two-agent exchange economy with one divisible good and money:
//   V_1 = sqrt(x_1) + m_1 + a u_2,   V_2 = sqrt(x_2) + m_2 + b u_1,
// endowments (1, M) each, money as numeraire. Induced utilities are
// U = B (sqrt(x) + m) with B = (1 / (1 - ab)) [[1, a], [b, 1]].

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affective/linalg.hpp"

namespace affective::economy {

class EconomyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EconomyModel {
  double a = 2.0;
  double b = 0.25;
  double money = 100.0;

  /// Throws EconomyError unless ab < 1, money > 0 and all values are finite.
  void validate() const;
};

/// B = (I - J)^{-1} for J = [[0, a], [b, 0]].
Matrix affection_inverse(const EconomyModel& e);

/// B (sqrt(x1), sqrt(2 - x1)): induced utilities without the money terms.
Vector goods_utilities(const EconomyModel& e, double x1);

struct CompetitiveEquilibrium {
  double price = 0.0;
  double money_price = 1.0;
  Vector allocation;
  Vector money_holdings;
  Vector goods_utilities;
  /// B m: the money part of the induced utilities.
  Vector money_shift;
  Vector utilities;
  double excess_demand = 0.0;
};

/// Market clearing price for the good with money as numeraire. Throws
/// EconomyError if money holdings turn negative.
CompetitiveEquilibrium competitive_equilibrium(const EconomyModel& e);

struct PlannerSolution {
  Vector lambda;
  /// (lambda_1 + lambda_2 b) / (lambda_1 a + lambda_2).
  double rhs = 0.0;
  bool interior = false;
  /// Set when no interior optimum exists: which corner the planner prefers.
  std::string boundary;
  double x1 = 0.0;
  double x2 = 0.0;
  Vector goods_utilities;
  double foc_residual = 0.0;
};

/// Maximizes lambda . U subject to x1 + x2 = 2 by bisection on the first
/// order condition sqrt(x1) / sqrt(2 - x1) = rhs.
PlannerSolution planner_solve(const EconomyModel& e, const Vector& lambda);

struct ScanRow {
  double lambda1 = 0.0;
  double x1 = 0.0;
  bool interior = false;
  Vector goods_utilities;
  bool dominates_equilibrium = false;
};

struct EfficiencyAudit {
  CompetitiveEquilibrium equilibrium;
  /// Weight direction (1 - b, 1 - a) under which x1 = 1 satisfies the planner FOC.
  Vector ray;
  bool ray_positive = false;
  /// Weights from the LP: lambda >= t, lambda B >= t, equal marginal
  /// weights at x1 = 1, sum lambda = 1.
  std::optional<Vector> lp_weights;
  double lp_slack = 0.0;
  /// Positive weights exist that make the equilibrium planner-optimal.
  bool weights_exist = false;
  std::vector<ScanRow> scan;
  /// Some scanned weight places the planner optimum at x1 = 1 (within 1e-8).
  bool scan_hits_equilibrium = false;
  /// Planner solution at lambda = (1, 1), or at the first scanned weight
  /// that dominates the equilibrium if (1, 1) does not.
  std::optional<PlannerSolution> improvement;
  bool improvement_dominates = false;
};

/// scan_points interior weights lambda_1 = k / (scan_points + 1).
EfficiencyAudit efficiency_audit(const EconomyModel& e, std::size_t scan_points = 99);

/// lambda1,x1,u1,u2 rows for plotting the weight scan.
std::string scan_csv(const EfficiencyAudit& audit);

}  // namespace affective::economy
