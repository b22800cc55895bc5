#include "affective/reproduce.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "affective/economy.hpp"
#include "affective/equilibrium.hpp"
#include "affective/examples.hpp"
#include "affective/serialize.hpp"
#include "affective/solver.hpp"
#include "affective/welfare.hpp"

namespace affective::reproduce {

namespace {

void add(Report& r, std::string quantity, double reference, double computed, double tol, std::string note = "") {
  Row row;
  row.quantity = std::move(quantity);
  row.reference = reference;
  row.computed = computed;
  row.tolerance = tol;
  row.pass = std::isfinite(computed) && std::fabs(computed - reference) <= tol;
  row.note = std::move(note);
  r.rows.push_back(std::move(row));
}

void add_flag(Report& r, std::string quantity, bool expected, bool computed, std::string note = "") {
  add(r, std::move(quantity), expected ? 1.0 : 0.0, computed ? 1.0 : 0.0, 0.0, std::move(note));
}

equilibrium::EquilibriumResult solve_eq(const InteractionModel& m, double x0, double y0) {
  Vector start(2);
  start << x0, y0;
  return equilibrium::find_parametric_equilibrium(m, start);
}

// Equilibrium rows shared by the game examples.
equilibrium::EquilibriumResult equilibrium_rows(Report& r, const InteractionModel& m, double x_ref, double y_ref,
                                                double tol, double x0, double y0) {
  auto eq = solve_eq(m, x0, y0);
  add_flag(r, "equilibrium verified", true, eq.verified(), equilibrium::to_string(eq.status));
  add(r, "x*", x_ref, eq.x(0), tol);
  add(r, "y*", y_ref, eq.x(1), tol);
  add(r, "consistency residual", 0.0, eq.consistency_residual, 1e-10);
  if (eq.verified()) {
    const auto dom = equilibrium::local_dominance_check(m, eq);
    add(r, "max cross partial d2U_i/dx_i dx_j", 0.0, dom.max_cross, dom.tolerance, "local dominance");
  }
  return eq;
}

void pareto_row(Report& r, const InteractionModel& m, const equilibrium::EquilibriumResult& eq, std::uint64_t seed,
                bool expect_improvement, const std::string& label) {
  welfare::GridSpec g;
  g.seed = seed;
  const auto cert = welfare::pareto_search(m, eq.x, eq.u, g);
  add_flag(r, label, expect_improvement, cert.outcome == welfare::Outcome::ImprovementFound,
           std::to_string(cert.examined) + " consistent grid points");
}

Report linear_two_person(std::uint64_t seed) {
  Report r;
  const auto m = examples::builtin("example1");
  const double a = m.params().at("a"), b = m.params().at("b");
  // argmax of x(1 - x) and sqrt(y) - y.
  const double xs = 0.5, ys = 0.25;
  const auto eq = equilibrium_rows(r, m, xs, ys, 1e-8, 0.3, 0.6);
  const double f = xs * (1 - xs), g = std::sqrt(ys) - ys;
  add(r, "U1* = (f + a g) / (1 - ab)", (f + a * g) / (1 - a * b), eq.u(0), 1e-10);
  add(r, "U2* = (g + b f) / (1 - ab)", (g + b * f) / (1 - a * b), eq.u(1), 1e-10);
  const auto game = solver::separable_induced(m);
  add(r, "B11", 1 / (1 - a * b), game.b()(0, 0), 1e-12);
  add(r, "B12", a / (1 - a * b), game.b()(0, 1), 1e-12);
  const auto w = welfare::welfare_weights(game.b());
  add_flag(r, "positive welfare weights exist", true, w.has_value());
  pareto_row(r, m, eq, seed, false, "Pareto improvement over equilibrium");
  return r;
}

Report nonseparable(std::uint64_t seed) {
  Report r;
  const auto m = examples::builtin("example2");
  const auto eq = equilibrium_rows(r, m, 0.24620, 0.50379, 1e-4, 0.5, 0.5);
  const double x = eq.x(0), y = eq.x(1);
  const double u1 = 8 * x * ((1 - x) - 2 * y * (1 - y)) / (8 + 2 * x * y);
  const double u2 = y * (8 * (1 - y) + x * (1 - x)) / (8 + 2 * x * y);
  add(r, "U1 closed form at x*", u1, eq.u(0), 1e-10);
  add(r, "U2 closed form at x*", u2, eq.u(1), 1e-10);
  const double beta1 = (2 * std::sqrt(2 * y * y * y - 2 * y * y + y + 4) - 4) / y;
  const double beta2 = (std::sqrt(-2 * x * x * x + 2 * x * x + 16 * x + 64) - 8) / (2 * x);
  add(r, "beta1(y*) vs x*", beta1, x, 1e-4);
  add(r, "beta2(x*) vs y*", beta2, y, 1e-4);
  const auto br2 = equilibrium::coupled_best_reply(m, 1, eq.x);
  add(r, "induced best reply of player 2 at x*", 0.50379, br2.action, 1e-4);
  pareto_row(r, m, eq, seed, false, "Pareto improvement over equilibrium");
  return r;
}

Report shifting_pos(std::uint64_t seed) {
  Report r;
  const auto m = examples::builtin("example3");
  const auto eq = equilibrium_rows(r, m, 0.75197, 0.75197, 1e-4, 0.5, 0.5);
  pareto_row(r, m, eq, seed, false, "Pareto improvement over equilibrium");
  welfare::GridSpec g;
  g.seed = seed;
  const auto wm = welfare::welfare_grid_max(m, Vector::Constant(2, 0.5), eq.x, g);
  add(r, "average-utility grid max distance (cells)", 0.0, wm.cell_distance, 1.0);
  return r;
}

Report shifting_neg(std::uint64_t seed) {
  Report r;
  const auto m = examples::builtin("example3_neg");
  const auto eq = equilibrium_rows(r, m, -0.68266, -0.68266, 1e-4, -0.5, -0.5);
  pareto_row(r, m, eq, seed, false, "Pareto improvement within quadrant");
  welfare::GridSpec g;
  g.seed = seed;
  const auto local = welfare::pareto_search(m, eq.x, eq.u, g);
  add_flag(r, "average utility improvable within quadrant", false, local.average.improves,
           "quadrant-only optimality");
  const auto full = examples::builtin("example3_full");
  const auto wide = welfare::pareto_search(full, eq.x, eq.u, g);
  add_flag(r, "average utility improvable on full box", true, wide.average.improves, "not globally optimal");
  add_flag(r, "Pareto improvement on full box", true, wide.outcome == welfare::Outcome::ImprovementFound,
           "componentwise domination");
  return r;
}

Report shifting_mixed(std::uint64_t seed) {
  Report r;
  const auto m = examples::builtin("example3_mixed");
  const auto eq = equilibrium_rows(r, m, 0.72471, -0.66576, 1e-4, 0.5, -0.5);
  welfare::GridSpec g;
  g.seed = seed;
  const auto local = welfare::pareto_search(m, eq.x, eq.u, g);
  add_flag(r, "Pareto improvement within quadrant", false, local.outcome == welfare::Outcome::ImprovementFound);
  add_flag(r, "average utility improvable within quadrant", false, local.average.improves,
           "quadrant-only optimality");
  const auto full = examples::builtin("example3_full");
  const auto wide = welfare::pareto_search(full, eq.x, eq.u, g);
  add_flag(r, "average utility improvable on full box", true, wide.average.improves, "not globally optimal");
  return r;
}

Report economy_run() {
  Report r;
  economy::EconomyModel e;
  const auto ce = economy::competitive_equilibrium(e);
  add(r, "competitive price p_x", 1.0, ce.price, 1e-10, "money is numeraire");
  add(r, "x1 at equilibrium", 1.0, ce.allocation(0), 1e-10);
  add(r, "x2 at equilibrium", 1.0, ce.allocation(1), 1e-10);
  add(r, "u1 goods part at equilibrium", 6.0, ce.goods_utilities(0), 1e-10);
  add(r, "u2 goods part at equilibrium", 2.5, ce.goods_utilities(1), 1e-10);
  const auto ps = economy::planner_solve(e, Vector::Ones(2));
  const double rr = 5.0 / 12.0, exact = 2 * rr * rr / (1 + rr * rr);
  add(r, "planner x1 (rounded reference)", 0.29, ps.x1, 5e-3);
  add(r, "planner x1 (exact root)", exact, ps.x1, 1e-5);
  add(r, "planner u1 (rounded reference)", 6.28, ps.goods_utilities(0), 5e-2);
  add(r, "planner u2 (rounded reference)", 2.87, ps.goods_utilities(1), 5e-2);
  const auto oracle = economy::goods_utilities(e, exact);
  add(r, "planner u1 (exact root)", oracle(0), ps.goods_utilities(0), 1e-4);
  add(r, "planner u2 (exact root)", oracle(1), ps.goods_utilities(1), 1e-4);
  const auto audit = economy::efficiency_audit(e);
  add(r, "weight ray lambda1 / lambda2 at x1 = 1", -0.75, audit.ray(0) / audit.ray(1), 1e-12);
  add_flag(r, "positive weights support equilibrium", false, audit.weights_exist);
  add_flag(r, "planner allocation dominates equilibrium", true, audit.improvement_dominates);
  return r;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

bool Report::passed() const {
  for (const Row& r : rows)
    if (!r.pass) return false;
  return true;
}

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids = {"linear-two-person", "nonseparable",   "shifting-pos",
                                               "shifting-neg",      "shifting-mixed", "economy"};
  return ids;
}

Report run(std::string_view id, std::uint64_t seed) {
  Report r;
  if (id == "linear-two-person")
    r = linear_two_person(seed);
  else if (id == "nonseparable")
    r = nonseparable(seed);
  else if (id == "shifting-pos")
    r = shifting_pos(seed);
  else if (id == "shifting-neg")
    r = shifting_neg(seed);
  else if (id == "shifting-mixed")
    r = shifting_mixed(seed);
  else if (id == "economy")
    r = economy_run();
  else
    throw std::invalid_argument("unknown example id '" + std::string(id) + "'");
  r.id = std::string(id);
  return r;
}

std::string format_table(const Report& report) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-44s %-18s %-18s %-12s %-10s %s\n", "quantity", "reference", "computed", "diff",
                "tol", "pass");
  out << "== " << report.id << '\n' << line;
  for (const Row& r : report.rows) {
    std::snprintf(line, sizeof line, "%-44s %-18s %-18s %-12s %-10s %s", r.quantity.c_str(), fmt(r.reference).c_str(),
                  fmt(r.computed).c_str(), fmt(std::fabs(r.computed - r.reference)).c_str(),
                  fmt(r.tolerance).c_str(), r.pass ? "PASS" : "FAIL");
    out << line;
    if (!r.note.empty()) out << "  (" << r.note << ')';
    out << '\n';
  }
  out << (report.passed() ? "all rows pass" : "some rows FAIL") << '\n';
  return out.str();
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Row& r : report.rows)
    rows.push_back({{"quantity", r.quantity},
                    {"reference", io::number(r.reference)},
                    {"computed", io::number(r.computed)},
                    {"diff", io::number(std::fabs(r.computed - r.reference))},
                    {"tolerance", io::number(r.tolerance)},
                    {"pass", r.pass},
                    {"note", r.note}});
  return {{"id", report.id}, {"passed", report.passed()}, {"rows", std::move(rows)}};
}

}  // namespace affective::reproduce
