#include "affective/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "affective/parallel.hpp"
#include "affective/simplex.hpp"

namespace affective::conditions {

namespace {

std::string format_subset(const std::vector<std::size_t>& s) {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < s.size(); ++k) out << (k ? "," : "") << s[k] + 1;
  out << '}';
  return out.str();
}

void check_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
  if (static_cast<std::size_t>(a.rows()) > kMaxPlayers)
    throw std::invalid_argument(std::string(who) + ": dimension exceeds " + std::to_string(kMaxPlayers));
}

// Per-sample outcome, merged in sample order.
struct SampleOutcome {
  bool evaluated = false;
  bool fails = false;
  double quantity = 0.0;  // min minor / max rho / slack, for the extremes
  double witness_value = 0.0;
  std::vector<std::size_t> subset;
  bool marginal = false;
};

template <typename PerSample>
ConditionReport run_sampled(int id, const InteractionModel& model, const Sampler& sampler, PerSample per_sample,
                            const char* failure_text) {
  const auto samples = draw_samples(model, sampler);
  std::vector<SampleOutcome> outcomes(samples.size());
  detail::parallel_for(samples.size(), [&](std::size_t k) {
    Matrix jac;
    try {
      jac = model.affection_jacobian(samples[k].first, samples[k].second);
    } catch (const expr::EvalError&) {
      return;
    }
    outcomes[k] = per_sample(k, jac);
    outcomes[k].evaluated = true;
  });

  ConditionReport report;
  report.assumption = id;
  report.seed = sampler.seed;
  report.u_box = sampler.u_box;
  bool first = true;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const SampleOutcome& o = outcomes[k];
    if (!o.evaluated) {
      ++report.skipped;
      continue;
    }
    ++report.samples;
    if (id == 2) report.extremes.min_minor = first ? o.quantity : std::min(report.extremes.min_minor, o.quantity);
    if (id == 4) report.extremes.max_rho = first ? o.quantity : std::max(report.extremes.max_rho, o.quantity);
    if (id == 5)
      report.extremes.min_lp_slack = first ? o.quantity : std::min(report.extremes.min_lp_slack, o.quantity);
    first = false;
    if (o.fails && !report.witness) {
      report.verdict = Verdict::Fails;
      Witness w;
      w.sample = k;
      w.x = samples[k].first;
      w.u = samples[k].second;
      w.subset = o.subset;
      w.value = o.witness_value;
      w.marginal = o.marginal;
      std::ostringstream d;
      d << failure_text;
      if (!o.subset.empty()) d << " on index set " << format_subset(o.subset);
      if (o.marginal) d << " (marginal)";
      w.description = d.str();
      report.witness = std::move(w);
    }
  }
  return report;
}

}  // namespace

PMatrixVerdict is_p_matrix(const Matrix& a, double tol_minor) {
  check_square(a, "is_p_matrix");
  const auto n = static_cast<std::size_t>(a.rows());
  PMatrixVerdict v;
  v.holds = true;
  v.min_minor = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    const auto rows = linalg::subset_indices(mask, n);
    const double minor = linalg::principal_minor(a, rows);
    v.min_minor = std::min(v.min_minor, minor);
    if (minor <= tol_minor && v.holds) {
      v.holds = false;
      v.witness = rows;
      v.witness_minor = minor;
      v.marginal = std::fabs(minor) <= tol_minor;
    }
  }
  return v;
}

bool reverses_sign(const Matrix& a, const Vector& y) {
  if (a.rows() != a.cols() || a.rows() != y.size()) throw std::invalid_argument("reverses_sign: dimension mismatch");
  if (y.isZero(0.0)) throw std::invalid_argument("reverses_sign: y must be nonzero");
  const Vector ay = a * y;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) * ay(i) > 0.0) return false;
  return true;
}

double spectral_radius(const Matrix& a) {
  check_square(a, "spectral_radius");
  return linalg::spectral_radius(a);
}

DominantDiagonal check_dominant_diagonal(const Matrix& a, double tol_lp) {
  check_square(a, "check_dominant_diagonal");
  const auto n = static_cast<std::size_t>(a.rows());
  for (std::size_t i = 0; i < n; ++i)
    if (!(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) > 0.0))
      throw std::invalid_argument("check_dominant_diagonal: diagonal must be positive");

  // Variables: h_1..h_n >= 0, s = s_plus - s_minus.
  lp::Problem p;
  const std::size_t nv = n + 2;
  p.objective.assign(nv, 0.0);
  p.objective[n] = 1.0;
  p.objective[n + 1] = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    lp::Constraint c;
    c.coefficients.assign(nv, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      c.coefficients[j] = (i == j) ? aij : -std::fabs(aij);
    }
    c.coefficients[n] = -1.0;
    c.coefficients[n + 1] = 1.0;
    c.sense = lp::Sense::GreaterEqual;
    c.rhs = 0.0;
    p.constraints.push_back(std::move(c));
  }
  lp::Constraint norm;
  norm.coefficients.assign(nv, 0.0);
  for (std::size_t j = 0; j < n; ++j) norm.coefficients[j] = 1.0;
  norm.sense = lp::Sense::Equal;
  norm.rhs = static_cast<double>(n);
  p.constraints.push_back(std::move(norm));
  // The slack is bounded above by max diagonal * n; cap s_plus to keep the
  // problem bounded even for degenerate inputs.
  lp::Constraint cap;
  cap.coefficients.assign(nv, 0.0);
  cap.coefficients[n] = 1.0;
  cap.sense = lp::Sense::LessEqual;
  cap.rhs = a.diagonal().maxCoeff() * static_cast<double>(n) + 1.0;
  p.constraints.push_back(std::move(cap));

  const lp::Solution sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw std::runtime_error("check_dominant_diagonal: LP solver failure");
  DominantDiagonal out;
  out.slack = sol.value;
  if (sol.value > tol_lp) {
    Vector h(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) h(static_cast<Eigen::Index>(j)) = sol.z[j];
    out.weights = h;
  }
  return out;
}

std::vector<std::pair<Vector, Vector>> draw_samples(const InteractionModel& model, const Sampler& sampler) {
  const auto n = static_cast<Eigen::Index>(model.players());
  std::mt19937_64 rng(sampler.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<Vector, Vector>> out;
  out.reserve(sampler.count);
  for (std::size_t k = 0; k < sampler.count; ++k) {
    Vector x(n), u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lo = model.window_lo(static_cast<std::size_t>(i));
      const double hi = model.window_hi(static_cast<std::size_t>(i));
      x(i) = lo + (hi - lo) * unit(rng);
    }
    for (Eigen::Index i = 0; i < n; ++i) u(i) = sampler.u_box * (2.0 * unit(rng) - 1.0);
    out.emplace_back(std::move(x), std::move(u));
  }
  return out;
}

ConditionReport check_assumption2(const InteractionModel& model, const Sampler& sampler) {
  const auto n = static_cast<Eigen::Index>(model.players());
  return run_sampled(
      2, model, sampler,
      [&](std::size_t k, const Matrix& jac) {
        const Matrix a = Matrix::Identity(n, n) - jac;
        const PMatrixVerdict v = is_p_matrix(a);
        SampleOutcome o;
        o.quantity = v.min_minor;
        if (!v.holds) {
          o.fails = true;
          o.subset = *v.witness;
          o.witness_value = v.witness_minor;
          o.marginal = v.marginal;
          return o;
        }
        std::mt19937_64 rng(sampler.seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        for (int probe = 0; probe < 100; ++probe) {
          Vector y(n);
          for (Eigen::Index i = 0; i < n; ++i) y(i) = coord(rng);
          if (!y.isZero(0.0) && reverses_sign(a, y))
            throw std::logic_error("check_assumption2: sign reversal on a matrix classified as a P-matrix");
        }
        return o;
      },
      "I - J has a non-positive principal minor");
}

ConditionReport check_assumption4(const InteractionModel& model, const Sampler& sampler) {
  const auto n = static_cast<std::size_t>(model.players());
  return run_sampled(
      4, model, sampler,
      [&](std::size_t, const Matrix& jac) {
        SampleOutcome o;
        for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
          const auto rows = linalg::subset_indices(mask, n);
          const double rho = linalg::spectral_radius(linalg::principal_submatrix(jac, rows));
          o.quantity = std::max(o.quantity, rho);
          if (rho >= 1.0 - kTolRho && !o.fails) {
            o.fails = true;
            o.subset = rows;
            o.witness_value = rho;
            o.marginal = std::fabs(rho - 1.0) <= kTolRho;
          }
        }
        return o;
      },
      "spectral radius of a sub-interaction Jacobian is not below 1");
}

ConditionReport check_assumption5(const InteractionModel& model, const Sampler& sampler) {
  const auto n = static_cast<Eigen::Index>(model.players());
  return run_sampled(
      5, model, sampler,
      [&](std::size_t, const Matrix& jac) {
        const DominantDiagonal d = check_dominant_diagonal(Matrix::Identity(n, n) - jac);
        SampleOutcome o;
        o.quantity = d.slack;
        o.witness_value = d.slack;
        o.fails = !d.weights.has_value();
        o.marginal = o.fails && std::fabs(d.slack) <= kTolLp;
        return o;
      },
      "no weight vector makes I - J diagonally dominant");
}

ConditionReport check_assumption(int id, const InteractionModel& model, const Sampler& sampler) {
  switch (id) {
    case 2: return check_assumption2(model, sampler);
    case 4: return check_assumption4(model, sampler);
    case 5: return check_assumption5(model, sampler);
    default: throw std::invalid_argument("unknown assumption id " + std::to_string(id) + " (expected 2, 4 or 5)");
  }
}

}  // namespace affective::conditions
