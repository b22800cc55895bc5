#include "affective/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace affective::io {

double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const solver::ConsistencySolution& s) {
  json limits = json::array();
  for (const Vector& l : s.distinct_limits) limits.push_back(to_json(l));
  return {{"status", solver::to_string(s.status)},
          {"u", to_json(s.u)},
          {"residual_norm", number(s.residual_norm)},
          {"iterations", s.iterations},
          {"method", solver::to_string(s.method)},
          {"det_ImJ", number(s.det_ImJ)},
          {"distinct_limits", std::move(limits)},
          {"starts_agree", s.starts_agree()}};
}

json to_json(const solver::PicardResult& r) {
  json head = json::array();
  const std::size_t shown = std::min<std::size_t>(r.trajectory.size(), 20);
  for (std::size_t k = 0; k < shown; ++k) head.push_back(to_json(r.trajectory[k]));
  return {{"verdict", solver::to_string(r.verdict)},
          {"steps", r.steps},
          {"final_u", to_json(r.final_u)},
          {"trajectory_head", std::move(head)}};
}

json to_json(const solver::InducedGameEval& e) {
  json out = {{"defined", e.defined}, {"x", to_json(e.x)}};
  if (e.defined) {
    out["U"] = to_json(e.u);
    out["grad"] = to_json(e.grad);
    out["det_ImJ"] = number(e.det_ImJ);
    out["ill_conditioned"] = e.ill_conditioned;
  } else {
    out["best_residual"] = number(e.solution.residual_norm);
  }
  return out;
}

json to_json(const conditions::ConditionReport& r) {
  json out = {{"assumption", r.assumption},
              {"verdict", r.verdict == conditions::Verdict::Fails ? "fails" : "holds-on-samples"},
              {"samples", r.samples},
              {"skipped", r.skipped},
              {"seed", r.seed},
              {"u_box", number(r.u_box)}};
  if (r.assumption == 2) out["min_minor"] = number(r.extremes.min_minor);
  if (r.assumption == 4) out["max_rho"] = number(r.extremes.max_rho);
  if (r.assumption == 5) out["min_lp_slack"] = number(r.extremes.min_lp_slack);
  if (r.witness) {
    const auto& w = *r.witness;
    json subset = json::array();
    for (std::size_t i : w.subset) subset.push_back(i + 1);
    out["witness"] = {{"sample", w.sample},     {"x", to_json(w.x)},     {"u", to_json(w.u)},
                      {"subset", std::move(subset)}, {"value", number(w.value)}, {"marginal", w.marginal},
                      {"description", w.description}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json to_json(const equilibrium::VerificationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back(
        {{"check", v.check}, {"player", v.player + 1}, {"action", number(v.action)}, {"amount", number(v.amount)}});
  return {{"flags",
           {{"consistent", r.flags.consistent},
            {"foc", r.flags.foc},
            {"parametric", r.flags.parametric},
            {"nash", r.flags.nash}}},
          {"consistency_residual", number(r.consistency_residual)},
          {"foc", to_json(r.foc)},
          {"max_parametric_gain", number(r.max_parametric_gain)},
          {"max_nash_gain", number(r.max_nash_gain)},
          {"undefined_deviations", r.undefined_deviations},
          {"violations", std::move(violations)}};
}

json to_json(const equilibrium::EquilibriumResult& r) {
  return {{"status", equilibrium::to_string(r.status)},
          {"x", to_json(r.x)},
          {"u", to_json(r.u)},
          {"consistency_residual", number(r.consistency_residual)},
          {"foc", to_json(r.foc)},
          {"curvature", to_json(r.curvature)},
          {"method", r.method},
          {"iterations", r.iterations},
          {"verification", to_json(r.verification)}};
}

json to_json(const equilibrium::BestReply& r) {
  return {{"action", number(r.action)}, {"value", number(r.value)}, {"interior", r.interior}};
}

json to_json(const equilibrium::DominanceReport& r) {
  json out = {{"cross", to_json(r.cross)},
              {"max_cross", number(r.max_cross)},
              {"scale", number(r.scale)},
              {"tolerance", number(r.tolerance)},
              {"own_gradient", to_json(r.own_gradient)},
              {"stationary", r.stationary},
              {"passes", r.passes}};
  out["undefined_probe"] = r.undefined_probe ? to_json(*r.undefined_probe) : json(nullptr);
  return out;
}

json to_json(const welfare::ParetoCertificate& c) {
  json out = {{"reference", {{"x", to_json(c.reference_x)}, {"u", to_json(c.reference_u)}}},
              {"grid",
               {{"per_axis", c.grid.per_axis},
                {"full_grid", c.full_grid},
                {"random_points", c.full_grid ? 0 : c.grid.random_points},
                {"seed", c.grid.seed},
                {"strict_tol", number(c.grid.strict_tol)}}},
              {"outcome", welfare::to_string(c.outcome)},
              {"examined", c.examined},
              {"skipped", c.skipped}};
  if (c.witness)
    out["witness"] = {{"index", c.witness->index},
                      {"x", to_json(c.witness->x)},
                      {"u", to_json(c.witness->u)},
                      {"residual", number(c.witness->residual)}};
  else
    out["witness"] = nullptr;
  out["average"] = {{"reference", number(c.average.reference_average)},
                    {"best", number(c.average.best_average)},
                    {"best_x", to_json(c.average.best_x)},
                    {"best_u", to_json(c.average.best_u)},
                    {"improves", c.average.improves}};
  return out;
}

json to_json(const welfare::WelfareWeights& w) {
  return {{"lambda", to_json(w.lambda)}, {"slack", number(w.slack)}, {"b", to_json(w.b)}};
}

json to_json(const welfare::WelfareGridMax& g) {
  return {{"argmax", to_json(g.argmax)},     {"max_value", number(g.max_value)},
          {"reference_value", number(g.reference_value)}, {"gap", number(g.gap)},
          {"cell_distance", number(g.cell_distance)},     {"examined", g.examined},
          {"skipped", g.skipped}};
}

json to_json(const economy::CompetitiveEquilibrium& ce) {
  return {{"price", number(ce.price)},
          {"money_price", number(ce.money_price)},
          {"allocation", to_json(ce.allocation)},
          {"money_holdings", to_json(ce.money_holdings)},
          {"goods_utilities", to_json(ce.goods_utilities)},
          {"money_shift", to_json(ce.money_shift)},
          {"utilities", to_json(ce.utilities)},
          {"excess_demand", number(ce.excess_demand)}};
}

json to_json(const economy::PlannerSolution& p) {
  json out = {{"lambda", to_json(p.lambda)},
              {"rhs", number(p.rhs)},
              {"interior", p.interior},
              {"x1", number(p.x1)},
              {"x2", number(p.x2)},
              {"goods_utilities", to_json(p.goods_utilities)},
              {"foc_residual", number(p.foc_residual)}};
  out["boundary"] = p.interior ? json(nullptr) : json(p.boundary);
  return out;
}

json to_json(const economy::EfficiencyAudit& a) {
  json out = {{"ray", to_json(a.ray)},
              {"ray_positive", a.ray_positive},
              {"lp_slack", number(a.lp_slack)},
              {"weights_exist", a.weights_exist},
              {"scan_points", a.scan.size()},
              {"scan_hits_equilibrium", a.scan_hits_equilibrium},
              {"improvement_dominates", a.improvement_dominates}};
  out["lp_weights"] = a.lp_weights ? to_json(*a.lp_weights) : json(nullptr);
  out["improvement"] = a.improvement ? to_json(*a.improvement) : json(nullptr);
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace affective::io
