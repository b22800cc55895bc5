#include "affective/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "affective/parallel.hpp"

namespace affective::equilibrium {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

solver::ConsistencyOptions single_start() {
  solver::ConsistencyOptions o;
  o.multistart = false;
  return o;
}

double try_value(const InteractionModel& model, std::size_t i, const Vector& x, const Vector& u) {
  try {
    const double v = model.utility_value(i, x, u);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const expr::EvalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double try_partial(const InteractionModel& model, std::size_t i, const Vector& x, const Vector& u) {
  try {
    const double v = model.own_partial(i, x, u);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const expr::EvalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// Stacked residual (dV/dx, u - V); +inf on domain errors.
double stacked_residual(const InteractionModel& model, const Vector& x, const Vector& u, Vector& g) {
  const auto n = static_cast<Eigen::Index>(model.players());
  g.resize(2 * n);
  try {
    g.head(n) = model.own_partials(x, u);
    g.tail(n) = model.residual(x, u);
  } catch (const expr::EvalError&) {
    return kInf;
  }
  const double r = sup_norm(g);
  return std::isfinite(r) ? r : kInf;
}

struct Candidate {
  double action;
  double value;
};

// Picks the best maximizer; ties within 1e-12 go to the smaller action.
std::optional<Candidate> best_of(std::vector<Candidate> c) {
  if (c.empty()) return std::nullopt;
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) { return a.action < b.action; });
  Candidate best = c.front();
  for (const Candidate& k : c)
    if (k.value > best.value + 1e-12) best = k;
  return best;
}

// Root of a decreasing crossing of g on [lo, hi] (g(lo) > 0 > g(hi)).
template <typename G>
double bisect_down(G&& g, double lo, double hi) {
  for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++k) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::isnan(gm)) break;
    if (gm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

template <typename G, typename V>
BestReply maximize_1d(const std::vector<double>& grid, G&& g, V&& value, double lo, double hi,
                      const std::function<double(double)>& polish) {
  std::vector<double> gv(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) gv[k] = g(grid[k]);

  std::vector<Candidate> crit;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = gv[k], b = gv[k + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    double root;
    if (a > 0.0 && b < 0.0) {
      root = polish(bisect_down(g, grid[k], grid[k + 1]));
    } else if (a == 0.0 && k > 0 && gv[k - 1] > 0.0 && b < 0.0) {
      root = grid[k];
    } else {
      continue;
    }
    root = std::clamp(root, lo, hi);
    const double v = value(root);
    if (!std::isnan(v)) crit.push_back({root, v});
  }
  BestReply out;
  if (auto best = best_of(crit)) {
    out.action = best->action;
    out.value = best->value;
    out.interior = true;
    return out;
  }
  std::vector<Candidate> ends;
  for (double t : {lo, hi}) {
    const double v = value(t);
    if (!std::isnan(v)) ends.push_back({t, v});
  }
  if (auto best = best_of(ends)) {
    out.action = best->action;
    out.value = best->value;
  } else {
    out.action = lo;
    out.value = std::numeric_limits<double>::quiet_NaN();
  }
  out.interior = false;
  return out;
}

bool within_window(const InteractionModel& model, std::size_t i, double t) {
  return t >= model.window_lo(i) && t <= model.window_hi(i);
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (std::size_t k = 0; k < count; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  out.back() = hi;
  return out;
}

BestReply best_reply(const InteractionModel& model, std::size_t i, const Vector& u, const EquilibriumOptions& opt) {
  if (i >= model.players()) throw std::out_of_range("best_reply: player index out of range");
  if (!u.allFinite()) throw std::invalid_argument("best_reply: utility levels must be finite");
  const double lo = model.window_lo(i), hi = model.window_hi(i);
  Vector x = model.window_midpoint();
  auto at = [&](double t) {
    Vector y = x;
    y(static_cast<Eigen::Index>(i)) = t;
    return y;
  };
  auto g = [&](double t) { return try_partial(model, i, at(t), u); };
  auto value = [&](double t) { return try_value(model, i, at(t), u); };
  auto polish = [&](double t) {
    for (int k = 0; k < 5; ++k) {
      double d1, d2;
      try {
        d1 = model.own_partial(i, at(t), u);
        d2 = model.own_second(i, at(t), u);
      } catch (const expr::EvalError&) {
        break;
      }
      if (!(d2 < 0.0)) break;
      const double next = t - d1 / d2;
      if (!within_window(model, i, next) || std::fabs(next - t) > 1e-6) break;
      t = next;
    }
    return t;
  };
  return maximize_1d(linspace(lo, hi, opt.grid), g, value, lo, hi, polish);
}

BestReply coupled_best_reply(const InteractionModel& model, std::size_t i, const Vector& x,
                             const EquilibriumOptions& opt) {
  if (i >= model.players()) throw std::out_of_range("coupled_best_reply: player index out of range");
  const double lo = model.window_lo(i), hi = model.window_hi(i);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto copts = single_start();
  auto at = [&](double t) {
    Vector y = x;
    y(ii) = t;
    return y;
  };
  auto g = [&](double t) {
    const auto ev = solver::induced_game(model, at(t), std::nullopt, copts);
    return ev.defined ? ev.grad(ii, ii) : std::numeric_limits<double>::quiet_NaN();
  };
  auto value = [&](double t) {
    const auto s = solver::solve_consistency(model, at(t), std::nullopt, copts);
    return s.converged() ? s.u(ii) : std::numeric_limits<double>::quiet_NaN();
  };
  auto polish = [](double t) { return t; };
  return maximize_1d(linspace(lo, hi, opt.grid), g, value, lo, hi, polish);
}

VerificationReport verify_equilibrium(const InteractionModel& model, const Vector& x, const Vector& u,
                                      const EquilibriumOptions& opt) {
  const std::size_t n = model.players();
  if (static_cast<std::size_t>(x.size()) != n || static_cast<std::size_t>(u.size()) != n)
    throw std::invalid_argument("verify_equilibrium: profile has wrong dimension");
  VerificationReport rep;

  try {
    rep.consistency_residual = sup_norm(model.residual(x, u));
  } catch (const expr::EvalError&) {
    rep.consistency_residual = kInf;
  }
  if (!std::isfinite(rep.consistency_residual)) rep.consistency_residual = kInf;
  rep.flags.consistent = rep.consistency_residual <= opt.consistency_tol * std::max(1.0, sup_norm(u));
  if (!rep.flags.consistent) rep.violations.push_back({"consistency", 0, 0.0, rep.consistency_residual});

  rep.foc = Vector::Constant(static_cast<Eigen::Index>(n), std::numeric_limits<double>::quiet_NaN());
  try {
    rep.foc = model.own_partials(x, u);
  } catch (const expr::EvalError&) {
  }
  rep.flags.foc = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = rep.foc(static_cast<Eigen::Index>(i));
    if (!(std::fabs(f) <= opt.foc_tol)) {
      rep.flags.foc = false;
      rep.violations.push_back({"foc", i, x(static_cast<Eigen::Index>(i)), f});
    }
  }

  // Parametric inequality and unilateral induced-game deviations share the grid.
  struct Probe {
    double action = 0.0;
    double param_gain = -kInf;
    double nash_gain = -kInf;
    bool undefined = false;
  };
  const auto copts = single_start();
  rep.flags.parametric = true;
  rep.flags.nash = true;
  rep.max_parametric_gain = -kInf;
  rep.max_nash_gain = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto grid = linspace(model.window_lo(i), model.window_hi(i), opt.grid);
    const double base_v = try_value(model, i, x, u);
    std::vector<Probe> probes(grid.size());
    detail::parallel_for(grid.size(), [&](std::size_t k) {
      Probe& p = probes[k];
      p.action = grid[k];
      Vector y = x;
      y(ii) = grid[k];
      const double v = try_value(model, i, y, u);
      if (!std::isnan(v) && !std::isnan(base_v)) p.param_gain = v - base_v;
      const auto s = solver::solve_consistency(model, y, u, copts);
      if (s.converged())
        p.nash_gain = s.u(ii) - u(ii);
      else
        p.undefined = true;
    });
    bool param_reported = false, nash_reported = false;
    for (const Probe& p : probes) {
      rep.max_parametric_gain = std::max(rep.max_parametric_gain, p.param_gain);
      rep.max_nash_gain = std::max(rep.max_nash_gain, p.nash_gain);
      if (p.undefined) ++rep.undefined_deviations;
      if (p.param_gain > opt.parametric_tol) {
        rep.flags.parametric = false;
        if (!param_reported) rep.violations.push_back({"parametric", i, p.action, p.param_gain});
        param_reported = true;
      }
      if (p.nash_gain > opt.nash_tol) {
        rep.flags.nash = false;
        if (!nash_reported) rep.violations.push_back({"nash", i, p.action, p.nash_gain});
        nash_reported = true;
      }
    }
  }
  return rep;
}

EquilibriumResult find_parametric_equilibrium(const InteractionModel& model, const Vector& start,
                                              const EquilibriumOptions& opt) {
  const auto n = static_cast<Eigen::Index>(model.players());
  if (start.size() != n) throw std::invalid_argument("find_parametric_equilibrium: start has wrong dimension");
  EquilibriumResult res;

  Vector x = model.clamp_to_inset(start);
  Vector u;
  {
    const auto s = solver::solve_consistency(model, x);
    if (s.converged()) {
      u = s.u;
    } else {
      try {
        u = model.evaluate_v(x, Vector::Zero(n));
      } catch (const expr::EvalError&) {
        u = Vector::Zero(n);
      }
    }
  }

  auto newton = [&](Vector& xs, Vector& us, int& iters) {
    Vector g;
    double r = stacked_residual(model, xs, us, g);
    for (iters = 0; iters < opt.max_newton && std::isfinite(r) && r > opt.newton_tol * std::max(1.0, sup_norm(us));
         ++iters) {
      Matrix jac = Matrix::Zero(2 * n, 2 * n);
      try {
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto si = static_cast<std::size_t>(i);
          jac(i, i) = model.own_second(si, xs, us);
          for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) jac(i, n + j) = model.cross_partial(si, static_cast<std::size_t>(j), xs, us);
          jac(n + i, i) = -model.own_partial(si, xs, us);
        }
        jac.bottomRightCorner(n, n) = Matrix::Identity(n, n) - model.affection_jacobian(xs, us);
      } catch (const expr::EvalError&) {
        return r;
      }
      const auto lu = jac.fullPivLu();
      if (!lu.isInvertible()) return r;
      const Vector step = lu.solve(-g);
      if (!step.allFinite()) return r;
      double t = 1.0;
      bool accepted = false;
      for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
        const Vector xt = model.clamp_to_inset(xs + t * step.head(n));
        const Vector ut = us + t * step.tail(n);
        Vector gt;
        const double rt = stacked_residual(model, xt, ut, gt);
        if (rt < r) {
          xs = xt;
          us = ut;
          g = gt;
          r = rt;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    return r;
  };

  int iters = 0;
  Vector xn = x, un = u;
  double r = newton(xn, un, iters);
  res.method = "newton";
  res.iterations = iters;
  bool ok = std::isfinite(r) && r <= opt.foc_tol && verify_equilibrium(model, xn, un, opt).flags.all();

  if (!ok) {
    // Sequential best replies against re-solved consistent utilities.
    Vector xb = x, ub = u;
    int round = 0;
    for (; round < opt.best_reply_rounds; ++round) {
      const Vector prev = xb;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto br = best_reply(model, static_cast<std::size_t>(i), ub, opt);
        xb(i) = br.action;
        const auto s = solver::solve_consistency(model, xb, ub, single_start());
        if (s.converged()) ub = s.u;
      }
      if (sup_norm(xb - prev) <= 1e-13) break;
    }
    int polish_iters = 0;
    const double rb = newton(xb, ub, polish_iters);
    if (!(rb >= r) || !std::isfinite(r)) {
      xn = xb;
      un = ub;
      r = rb;
      res.method = "best-reply";
      res.iterations = iters + round + polish_iters;
    }
  }

  // Re-solve consistency at the final actions so u* is as tight as possible.
  {
    const auto s = solver::solve_consistency(model, xn, un, single_start());
    if (s.converged()) un = s.u;
  }
  res.x = xn;
  res.u = un;
  res.verification = verify_equilibrium(model, xn, un, opt);
  res.consistency_residual = res.verification.consistency_residual;
  res.foc = res.verification.foc;
  res.curvature = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      res.curvature(i) = model.own_second(static_cast<std::size_t>(i), xn, un);
    } catch (const expr::EvalError&) {
    }
  }
  const Flags& f = res.verification.flags;
  if (f.all())
    res.status = Status::Verified;
  else if (!f.consistent || !f.foc)
    res.status = Status::NoConvergence;
  else if (!f.parametric)
    res.status = Status::NonMaximum;
  else
    res.status = Status::Unverified;
  return res;
}

std::vector<EquilibriumResult> multistart_equilibria(const InteractionModel& model, std::size_t starts,
                                                     std::uint64_t seed, const EquilibriumOptions& opt) {
  const auto n = static_cast<Eigen::Index>(model.players());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> points(starts, Vector(n));
  for (auto& p : points)
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      p(i) = model.window_lo(si) + (model.window_hi(si) - model.window_lo(si)) * unit(rng);
    }
  std::vector<EquilibriumResult> found;
  for (const Vector& p : points) {
    EquilibriumResult r = find_parametric_equilibrium(model, p, opt);
    if (!r.verified()) continue;
    const bool dup = std::any_of(found.begin(), found.end(),
                                 [&](const EquilibriumResult& e) { return sup_norm(e.x - r.x) <= 1e-6; });
    if (!dup) found.push_back(std::move(r));
  }
  return found;
}

DominanceReport local_dominance_check(const InteractionModel& model, const EquilibriumResult& eq, double h,
                                      double rel_tol) {
  if (!eq.verified()) throw PreconditionError("local dominance applies only at a verified equilibrium");
  const auto n = static_cast<Eigen::Index>(model.players());
  DominanceReport rep;
  rep.cross = Matrix::Zero(n, n);

  const auto copts = single_start();
  const auto centre = solver::induced_game(model, eq.x, eq.u, copts);
  if (!centre.defined) {
    rep.undefined_probe = eq.x;
    return rep;
  }
  rep.own_gradient = centre.grad.diagonal();

  for (Eigen::Index j = 0; j < n; ++j) {
    Vector xp = eq.x, xm = eq.x;
    xp(j) += h;
    xm(j) -= h;
    const auto gp = solver::induced_game(model, xp, eq.u, copts);
    const auto gm = solver::induced_game(model, xm, eq.u, copts);
    if (!gp.defined || !gm.defined) {
      rep.undefined_probe = gp.defined ? xm : xp;
      return rep;
    }
    // d/dx_j of dU_i/dx_i for every i.
    for (Eigen::Index i = 0; i < n; ++i) rep.cross(i, j) = (gp.grad(i, i) - gm.grad(i, i)) / (2.0 * h);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    rep.scale = std::max(rep.scale, std::fabs(rep.cross(i, i)));
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) rep.max_cross = std::max(rep.max_cross, std::fabs(rep.cross(i, j)));
  }
  rep.tolerance = rel_tol * std::max(1.0, rep.scale);
  rep.stationary = sup_norm(rep.own_gradient) <= 1e-8 * std::max(1.0, sup_norm(centre.grad));
  rep.passes = rep.stationary && rep.max_cross <= rep.tolerance;
  return rep;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Verified: return "verified";
    case Status::NoConvergence: return "no-convergence";
    case Status::NonMaximum: return "non-maximum";
    case Status::Unverified: return "unverified";
  }
  return "";
}

}  // namespace affective::equilibrium
