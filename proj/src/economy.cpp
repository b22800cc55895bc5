#include "affective/economy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "affective/simplex.hpp"

namespace affective::economy {

namespace {

constexpr double kEdge = 1e-300;

// Demand for the good at price p (money price 1): maximizes
// sqrt(x) + (p + M - p x), so 1 / (2 sqrt(x)) = p.
double demand(double p) { return 1.0 / (4.0 * p * p); }

// Money terms cancel from every comparison between allocations, so only the
// goods part is compared when testing domination.
bool strictly_dominates(const Vector& u, const Vector& ref) { return u(0) > ref(0) && u(1) > ref(1); }

}  // namespace

void EconomyModel::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(money))
    throw EconomyError("economy parameters must be finite");
  if (!(a * b < 1.0)) throw EconomyError("affection product ab must be below 1");
  if (!(money > 0.0)) throw EconomyError("money endowment must be positive");
}

Matrix affection_inverse(const EconomyModel& e) {
  e.validate();
  Matrix b(2, 2);
  b << 1.0, e.a, e.b, 1.0;
  return b / (1.0 - e.a * e.b);
}

Vector goods_utilities(const EconomyModel& e, double x1) {
  if (!(x1 >= 0.0 && x1 <= 2.0)) throw EconomyError("allocation must lie in [0, 2]");
  Vector base(2);
  base << std::sqrt(x1), std::sqrt(2.0 - x1);
  return affection_inverse(e) * base;
}

CompetitiveEquilibrium competitive_equilibrium(const EconomyModel& e) {
  e.validate();
  // Each agent's own weight in B is 1 / (1 - ab) > 0, so the demand does not
  // depend on the other agent's bundle. Bisect excess demand in log price.
  double lo = std::log(1e-6), hi = std::log(1e6);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double z = 2.0 * demand(std::exp(mid)) - 2.0;
    if (z > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  CompetitiveEquilibrium ce;
  ce.price = std::exp(0.5 * (lo + hi));
  const double x = demand(ce.price);
  ce.excess_demand = 2.0 * x - 2.0;
  ce.allocation = Vector::Constant(2, x);
  // Market clearing is exact by symmetry; remove bisection noise.
  if (std::fabs(ce.excess_demand) < 1e-12) {
    ce.allocation = Vector::Constant(2, 1.0);
    ce.excess_demand = 0.0;
  }
  ce.money_holdings.resize(2);
  for (Eigen::Index i = 0; i < 2; ++i) ce.money_holdings(i) = e.money + ce.price * (1.0 - ce.allocation(i));
  if (!(ce.money_holdings.minCoeff() > 0.0)) throw EconomyError("money holdings turn negative; increase M");
  const Matrix bm = affection_inverse(e);
  ce.goods_utilities = goods_utilities(e, ce.allocation(0));
  ce.money_shift = bm * ce.money_holdings;
  ce.utilities = ce.goods_utilities + ce.money_shift;
  return ce;
}

PlannerSolution planner_solve(const EconomyModel& e, const Vector& lambda) {
  e.validate();
  if (lambda.size() != 2 || !lambda.allFinite()) throw EconomyError("lambda must have two finite entries");
  if (lambda.minCoeff() < 0.0 || !(lambda.sum() > 0.0)) throw EconomyError("lambda must be nonnegative and nonzero");
  PlannerSolution s;
  s.lambda = lambda;
  // Weighted coefficients of sqrt(x1) and sqrt(x2) in lambda . U, up to 1/(1-ab).
  const double c1 = lambda(0) + lambda(1) * e.b;
  const double c2 = lambda(0) * e.a + lambda(1);
  s.rhs = c2 != 0.0 ? c1 / c2 : std::copysign(INFINITY, c1);
  if (!(c1 > 0.0 && c2 > 0.0)) {
    s.interior = false;
    if (c1 > 0.0 && c2 <= 0.0) {
      s.boundary = "planner gives the whole good to agent 1";
      s.x1 = 2.0;
    } else if (c2 > 0.0 && c1 <= 0.0) {
      s.boundary = "planner gives the whole good to agent 2";
      s.x1 = 0.0;
    } else {
      s.boundary = "planner objective is nonincreasing in both allocations";
      s.x1 = 0.0;
    }
    s.x2 = 2.0 - s.x1;
    s.goods_utilities = goods_utilities(e, s.x1);
    s.foc_residual = NAN;
    return s;
  }
  // sqrt(x1 / (2 - x1)) is strictly increasing from 0 to infinity on (0, 2).
  auto lhs = [](double x1) { return std::sqrt(x1) / std::sqrt(2.0 - x1); };
  double lo = kEdge, hi = 2.0 - 1e-15;
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) < s.rhs)
      lo = mid;
    else
      hi = mid;
  }
  s.interior = true;
  s.x1 = 0.5 * (lo + hi);
  s.x2 = 2.0 - s.x1;
  s.goods_utilities = goods_utilities(e, s.x1);
  s.foc_residual = lhs(s.x1) - s.rhs;
  return s;
}

EfficiencyAudit efficiency_audit(const EconomyModel& e, std::size_t scan_points) {
  e.validate();
  EfficiencyAudit audit;
  audit.equilibrium = competitive_equilibrium(e);
  const Vector& u_hat = audit.equilibrium.goods_utilities;
  const double x_hat = audit.equilibrium.allocation(0);

  // At x1 = 1 the FOC needs lambda_1 + lambda_2 b = lambda_1 a + lambda_2.
  audit.ray.resize(2);
  audit.ray << 1.0 - e.b, 1.0 - e.a;
  if (audit.ray(0) < 0.0 || (audit.ray(0) == 0.0 && audit.ray(1) < 0.0)) audit.ray = -audit.ray;
  audit.ray_positive = audit.ray(0) > 0.0 && audit.ray(1) > 0.0;
  if (audit.ray.sum() > 0.0) audit.ray /= audit.ray.sum();

  // Variables lambda_1, lambda_2 >= 0 and t = t_plus - t_minus.
  const Matrix bm = affection_inverse(e);
  lp::Problem p;
  p.objective = {0.0, 0.0, 1.0, -1.0};
  for (int i = 0; i < 2; ++i) {
    lp::Constraint c{{0.0, 0.0, -1.0, 1.0}, lp::Sense::GreaterEqual, 0.0};
    c.coefficients[static_cast<std::size_t>(i)] = 1.0;
    p.constraints.push_back(c);
  }
  for (Eigen::Index j = 0; j < 2; ++j)
    p.constraints.push_back({{bm(0, j), bm(1, j), -1.0, 1.0}, lp::Sense::GreaterEqual, 0.0});
  p.constraints.push_back({{1.0 - e.a, e.b - 1.0, 0.0, 0.0}, lp::Sense::Equal, 0.0});
  p.constraints.push_back({{1.0, 1.0, 0.0, 0.0}, lp::Sense::Equal, 1.0});
  const lp::Solution sol = lp::solve(p);
  if (sol.status == lp::Status::Optimal) {
    audit.lp_slack = sol.value;
    if (sol.value > 1e-9) {
      Vector w(2);
      w << sol.z[0], sol.z[1];
      audit.lp_weights = w;
    }
  } else {
    audit.lp_slack = -INFINITY;
  }
  audit.weights_exist = audit.ray_positive && audit.lp_weights.has_value();

  for (std::size_t k = 1; k <= scan_points; ++k) {
    ScanRow row;
    row.lambda1 = static_cast<double>(k) / static_cast<double>(scan_points + 1);
    Vector lambda(2);
    lambda << row.lambda1, 1.0 - row.lambda1;
    const PlannerSolution ps = planner_solve(e, lambda);
    row.x1 = ps.x1;
    row.interior = ps.interior;
    row.goods_utilities = ps.goods_utilities;
    row.dominates_equilibrium = strictly_dominates(ps.goods_utilities, u_hat);
    if (ps.interior && std::fabs(ps.x1 - x_hat) <= 1e-8) audit.scan_hits_equilibrium = true;
    audit.scan.push_back(std::move(row));
  }

  PlannerSolution at_ones = planner_solve(e, Vector::Ones(2));
  if (strictly_dominates(at_ones.goods_utilities, u_hat)) {
    audit.improvement = at_ones;
    audit.improvement_dominates = true;
  } else {
    for (const ScanRow& row : audit.scan) {
      if (!row.dominates_equilibrium) continue;
      Vector lambda(2);
      lambda << row.lambda1, 1.0 - row.lambda1;
      audit.improvement = planner_solve(e, lambda);
      audit.improvement_dominates = true;
      break;
    }
    if (!audit.improvement) audit.improvement = at_ones;
  }
  return audit;
}

std::string scan_csv(const EfficiencyAudit& audit) {
  std::ostringstream out;
  out << "lambda1,x1,u1,u2\n";
  char line[128];
  for (const ScanRow& r : audit.scan) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g\n", r.lambda1, r.x1, r.goods_utilities(0),
                  r.goods_utilities(1));
    out << line;
  }
  return out.str();
}

}  // namespace affective::economy
