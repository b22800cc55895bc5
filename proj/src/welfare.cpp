#include "affective/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "affective/equilibrium.hpp"
#include "affective/parallel.hpp"
#include "affective/simplex.hpp"
#include "affective/solver.hpp"

namespace affective::welfare {

namespace {

// Enumerates either the full per-axis grid (player 0 is the most significant
// digit) or a seeded uniform sample of the model window.
class PointSet {
 public:
  PointSet(const InteractionModel& model, const GridSpec& spec) : n_(model.players()) {
    full_ = n_ <= spec.full_grid_max_players;
    if (full_) {
      if (spec.per_axis < 1) throw std::invalid_argument("grid needs at least one point per axis");
      axes_.reserve(n_);
      for (std::size_t i = 0; i < n_; ++i)
        axes_.push_back(equilibrium::linspace(model.window_lo(i), model.window_hi(i), spec.per_axis));
      count_ = 1;
      for (std::size_t i = 0; i < n_; ++i) count_ *= spec.per_axis;
    } else {
      count_ = spec.random_points;
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      samples_.resize(count_ * n_);
      for (std::size_t k = 0; k < count_; ++k)
        for (std::size_t i = 0; i < n_; ++i)
          samples_[k * n_ + i] = model.window_lo(i) + (model.window_hi(i) - model.window_lo(i)) * unit(rng);
    }
  }

  std::size_t size() const { return count_; }
  bool full() const { return full_; }

  Vector at(std::size_t k) const {
    Vector x(static_cast<Eigen::Index>(n_));
    if (full_) {
      for (std::size_t i = n_; i-- > 0;) {
        const std::size_t m = axes_[i].size();
        x(static_cast<Eigen::Index>(i)) = axes_[i][k % m];
        k /= m;
      }
    } else {
      for (std::size_t i = 0; i < n_; ++i) x(static_cast<Eigen::Index>(i)) = samples_[k * n_ + i];
    }
    return x;
  }

 private:
  std::size_t n_;
  bool full_ = true;
  std::size_t count_ = 0;
  std::vector<std::vector<double>> axes_;
  std::vector<double> samples_;
};

solver::ConsistencyOptions single_start() {
  solver::ConsistencyOptions o;
  o.multistart = false;
  return o;
}

}  // namespace

bool pareto_dominates(const Vector& u, const Vector& ref, double strict_tol) {
  if (u.size() != ref.size()) throw std::invalid_argument("pareto_dominates: dimension mismatch");
  bool strict = false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u(i) >= ref(i))) return false;
    if (u(i) > ref(i) + strict_tol) strict = true;
  }
  return strict;
}

ParetoCertificate pareto_search(const InteractionModel& model, const Vector& x_ref, const Vector& u_ref,
                                const GridSpec& spec) {
  const auto n = static_cast<Eigen::Index>(model.players());
  if (x_ref.size() != n || u_ref.size() != n) throw std::invalid_argument("pareto_search: dimension mismatch");

  const PointSet points(model, spec);
  struct PointOutcome {
    bool solved = false;
    bool dominates = false;
    double average = 0.0;
  };
  std::vector<PointOutcome> outcomes(points.size());
  const auto copts = single_start();
  detail::parallel_for(points.size(), [&](std::size_t k) {
    const auto s = solver::solve_consistency(model, points.at(k), std::nullopt, copts);
    if (!s.converged()) return;
    outcomes[k].solved = true;
    outcomes[k].dominates = pareto_dominates(s.u, u_ref, spec.strict_tol);
    outcomes[k].average = s.u.mean();
  });

  ParetoCertificate cert;
  cert.reference_x = x_ref;
  cert.reference_u = u_ref;
  cert.grid = spec;
  cert.full_grid = points.full();
  cert.average.reference_average = u_ref.mean();
  cert.average.best_average = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_avg;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const PointOutcome& o = outcomes[k];
    if (!o.solved) {
      ++cert.skipped;
      continue;
    }
    ++cert.examined;
    if (o.dominates && !cert.witness) {
      ParetoWitness w;
      w.index = k;
      w.x = points.at(k);
      const auto s = solver::solve_consistency(model, w.x, std::nullopt, copts);
      w.u = s.u;
      w.residual = s.residual_norm;
      cert.witness = std::move(w);
      cert.outcome = Outcome::ImprovementFound;
    }
    if (o.average > cert.average.best_average) {
      cert.average.best_average = o.average;
      best_avg = k;
    }
  }
  if (best_avg) {
    cert.average.best_x = points.at(*best_avg);
    cert.average.best_u = solver::solve_consistency(model, cert.average.best_x, std::nullopt, copts).u;
    cert.average.improves = cert.average.best_average > cert.average.reference_average + spec.strict_tol;
  }
  return cert;
}

bool verify_weights(const Matrix& b, const Vector& lambda) {
  if (b.rows() != b.cols() || b.rows() != lambda.size()) throw std::invalid_argument("verify_weights: dimension mismatch");
  if (lambda.size() == 0) return false;
  const Vector lb = b.transpose() * lambda;
  return lambda.minCoeff() > 0.0 && lb.minCoeff() > 0.0;
}

std::optional<WelfareWeights> welfare_weights(const Matrix& b, double tol) {
  if (b.rows() != b.cols()) throw std::invalid_argument("welfare_weights: matrix is not square");
  const auto n = static_cast<std::size_t>(b.rows());
  if (n == 0 || n > kMaxPlayers)
    throw std::invalid_argument("welfare_weights: dimension must be between 1 and " + std::to_string(kMaxPlayers));
  if (!b.allFinite()) throw std::invalid_argument("welfare_weights: matrix has non-finite entries");

  // Variables: lambda_1..lambda_n >= 0, t = t_plus - t_minus.
  const std::size_t nv = n + 2;
  lp::Problem p;
  p.objective.assign(nv, 0.0);
  p.objective[n] = 1.0;
  p.objective[n + 1] = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    lp::Constraint c;
    c.coefficients.assign(nv, 0.0);
    c.coefficients[i] = 1.0;
    c.coefficients[n] = -1.0;
    c.coefficients[n + 1] = 1.0;
    c.sense = lp::Sense::GreaterEqual;
    p.constraints.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < n; ++j) {
    lp::Constraint c;
    c.coefficients.assign(nv, 0.0);
    for (std::size_t i = 0; i < n; ++i) c.coefficients[i] = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    c.coefficients[n] = -1.0;
    c.coefficients[n + 1] = 1.0;
    c.sense = lp::Sense::GreaterEqual;
    p.constraints.push_back(std::move(c));
  }
  lp::Constraint sum;
  sum.coefficients.assign(nv, 0.0);
  for (std::size_t i = 0; i < n; ++i) sum.coefficients[i] = 1.0;
  sum.sense = lp::Sense::Equal;
  sum.rhs = 1.0;
  p.constraints.push_back(std::move(sum));

  const lp::Solution sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw std::runtime_error("welfare_weights: LP did not reach an optimum");
  if (!(sol.value > tol)) return std::nullopt;

  WelfareWeights w;
  w.lambda.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) w.lambda(static_cast<Eigen::Index>(i)) = sol.z[i];
  w.slack = sol.value;
  w.b = b;
  if (!verify_weights(b, w.lambda)) return std::nullopt;
  return w;
}

double welfare_value(const InteractionModel& model, const Vector& lambda, const Vector& x) {
  if (lambda.size() != static_cast<Eigen::Index>(model.players()))
    throw std::invalid_argument("welfare_value: weight vector has wrong dimension");
  const auto s = solver::solve_consistency(model, x);
  if (!s.converged()) throw solver::InducedGameUndefined("induced game undefined at the given actions");
  return lambda.dot(s.u);
}

WelfareGridMax welfare_grid_max(const InteractionModel& model, const Vector& lambda, const Vector& x_ref,
                                const GridSpec& spec) {
  const auto n = static_cast<Eigen::Index>(model.players());
  if (lambda.size() != n || x_ref.size() != n) throw std::invalid_argument("welfare_grid_max: dimension mismatch");
  WelfareGridMax out;
  out.reference_value = welfare_value(model, lambda, x_ref);

  const PointSet points(model, spec);
  std::vector<double> values(points.size(), std::numeric_limits<double>::quiet_NaN());
  const auto copts = single_start();
  detail::parallel_for(points.size(), [&](std::size_t k) {
    const auto s = solver::solve_consistency(model, points.at(k), std::nullopt, copts);
    if (s.converged()) values[k] = lambda.dot(s.u);
  });
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isnan(values[k])) {
      ++out.skipped;
      continue;
    }
    ++out.examined;
    if (!best || values[k] > values[*best]) best = k;
  }
  if (!best) throw solver::InducedGameUndefined("induced game undefined on the whole grid");
  out.argmax = points.at(*best);
  out.max_value = values[*best];
  out.gap = out.max_value - out.reference_value;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const double cell = spec.per_axis > 1
                            ? (model.window_hi(si) - model.window_lo(si)) / static_cast<double>(spec.per_axis - 1)
                            : 1.0;
    out.cell_distance = std::max(out.cell_distance, std::fabs(out.argmax(i) - x_ref(i)) / cell);
  }
  return out;
}

std::string to_string(Outcome o) {
  return o == Outcome::ImprovementFound ? "improvement-found" : "no-improvement-found";
}

}  // namespace affective::welfare
