#include "affective/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace affective::lp {

namespace {

constexpr double kEps = 1e-12;

// Tableau rows 0..m-1 are constraints, column `cols` is the right-hand side.
struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<std::size_t> basis;

  double& at(std::size_t r, std::size_t c) { return data[r * (cols + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * (cols + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  }
};

// Maximizes cost . z over the current tableau using columns [0, usable).
// Returns false when unbounded.
bool optimize(Tableau& t, const std::vector<double>& cost, std::size_t usable) {
  for (int guard = 0; guard < 100000; ++guard) {
    // Reduced cost of column c: cost_c - sum_r cost_basis(r) * a_rc.
    std::size_t entering = usable;
    for (std::size_t c = 0; c < usable; ++c) {
      double reduced = cost[c];
      for (std::size_t r = 0; r < t.rows; ++r) reduced -= cost[t.basis[r]] * t.at(r, c);
      if (reduced > kEps) {
        entering = c;
        break;
      }
    }
    if (entering == usable) return true;
    std::size_t leaving = t.rows;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows; ++r) {
      const double a = t.at(r, entering);
      if (a > kEps) {
        const double ratio = t.rhs(r) / a;
        if (ratio < best - kEps || (std::fabs(ratio - best) <= kEps && t.basis[r] < t.basis[leaving])) {
          best = ratio;
          leaving = r;
        }
      }
    }
    if (leaving == t.rows) return false;
    t.pivot(leaving, entering);
  }
  throw std::runtime_error("simplex: iteration guard exceeded");
}

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t nvars = problem.objective.size();
  const std::size_t m = problem.constraints.size();
  for (const auto& c : problem.constraints)
    if (c.coefficients.size() != nvars) throw std::invalid_argument("simplex: constraint width mismatch");

  // Normalise to non-negative right-hand sides.
  std::vector<Constraint> rows = problem.constraints;
  for (auto& c : rows) {
    if (c.rhs < 0.0) {
      for (double& v : c.coefficients) v = -v;
      c.rhs = -c.rhs;
      if (c.sense == Sense::LessEqual)
        c.sense = Sense::GreaterEqual;
      else if (c.sense == Sense::GreaterEqual)
        c.sense = Sense::LessEqual;
    }
  }

  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& c : rows) {
    if (c.sense != Sense::Equal) ++slack_count;
    if (c.sense != Sense::LessEqual) ++artificial_count;
  }
  const std::size_t structural = nvars + slack_count;
  Tableau t;
  t.rows = m;
  t.cols = structural + artificial_count;
  t.data.assign(m * (t.cols + 1), 0.0);
  t.basis.assign(m, 0);

  std::size_t slack = nvars;
  std::size_t artificial = structural;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& c = rows[r];
    for (std::size_t v = 0; v < nvars; ++v) t.at(r, v) = c.coefficients[v];
    t.rhs(r) = c.rhs;
    switch (c.sense) {
      case Sense::LessEqual:
        t.at(r, slack) = 1.0;
        t.basis[r] = slack++;
        break;
      case Sense::GreaterEqual:
        t.at(r, slack++) = -1.0;
        t.at(r, artificial) = 1.0;
        t.basis[r] = artificial++;
        break;
      case Sense::Equal:
        t.at(r, artificial) = 1.0;
        t.basis[r] = artificial++;
        break;
    }
  }

  Solution out;
  if (artificial_count > 0) {
    std::vector<double> phase1(t.cols, 0.0);
    for (std::size_t c = structural; c < t.cols; ++c) phase1[c] = -1.0;
    optimize(t, phase1, t.cols);
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m; ++r)
      if (t.basis[r] >= structural) infeasibility += t.rhs(r);
    if (infeasibility > 1e-9) {
      out.status = Status::Infeasible;
      return out;
    }
    // Drive remaining zero-level artificials out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis[r] < structural) continue;
      for (std::size_t c = 0; c < structural; ++c) {
        if (std::fabs(t.at(r, c)) > 1e-9) {
          t.pivot(r, c);
          break;
        }
      }
    }
  }

  std::vector<double> cost(t.cols, 0.0);
  for (std::size_t v = 0; v < nvars; ++v) cost[v] = problem.objective[v];
  if (!optimize(t, cost, structural)) {
    out.status = Status::Unbounded;
    return out;
  }
  out.status = Status::Optimal;
  out.z.assign(nvars, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (t.basis[r] < nvars) out.z[t.basis[r]] = t.rhs(r);
  for (std::size_t v = 0; v < nvars; ++v) out.value += problem.objective[v] * out.z[v];
  return out;
}

}  // namespace affective::lp
