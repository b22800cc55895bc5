#include "affective/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace affective::solver {

namespace {

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double scaled(double tol, const Vector& u) { return tol * std::max(1.0, sup_norm(u)); }

// Residual that maps expression domain errors to +inf so that line search
// treats them as rejected steps.
double safe_residual(const InteractionModel& model, const Vector& x, const Vector& u, Vector& f) {
  try {
    f = model.residual(x, u);
  } catch (const expr::EvalError&) {
    return std::numeric_limits<double>::infinity();
  }
  const double r = sup_norm(f);
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

ConsistencySolution closed_form(const InteractionModel& model, const Vector& x) {
  const auto n = static_cast<Eigen::Index>(model.players());
  const Vector zero = Vector::Zero(n);
  ConsistencySolution s;
  s.method = Method::ClosedForm;
  s.iterations = 1;
  Matrix a;
  Vector f;
  try {
    a = Matrix::Identity(n, n) - model.affection_jacobian(x, zero);
    f = model.evaluate_v(x, zero);
  } catch (const expr::EvalError&) {
    s.status = Status::NoConvergence;
    s.u = zero;
    s.residual_norm = std::numeric_limits<double>::infinity();
    return s;
  }
  const auto lu = a.partialPivLu();
  s.det_ImJ = lu.determinant();
  if (!(std::fabs(s.det_ImJ) > 1e-12)) {
    s.status = Status::Singular;
    s.u = zero;
    Vector r;
    s.residual_norm = safe_residual(model, x, zero, r);
    return s;
  }
  s.u = lu.solve(f);
  Vector r;
  s.residual_norm = safe_residual(model, x, s.u, r);
  s.status = s.residual_norm <= scaled(1e-10, s.u) ? Status::Converged : Status::NoConvergence;
  return s;
}

ConsistencySolution newton_from(const InteractionModel& model, const Vector& x, const Vector& u0,
                                const ConsistencyOptions& opt) {
  const auto n = static_cast<Eigen::Index>(model.players());
  const Matrix id = Matrix::Identity(n, n);
  ConsistencySolution s;
  s.method = Method::Newton;
  Vector u = u0;
  Vector f;
  double r = safe_residual(model, x, u, f);
  bool singular = false;

  int it = 0;
  for (; it < opt.max_newton && std::isfinite(r) && r > scaled(opt.tol, u); ++it) {
    Matrix a;
    try {
      a = id - model.affection_jacobian(x, u);
    } catch (const expr::EvalError&) {
      break;
    }
    const auto lu = a.partialPivLu();
    const double det = lu.determinant();
    if (!std::isfinite(det) || std::fabs(det) < 1e-14) {
      singular = true;
      s.det_ImJ = det;
      break;
    }
    const Vector step = lu.solve(-f);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      Vector f_try;
      const Vector u_try = u + t * step;
      const double r_try = safe_residual(model, x, u_try, f_try);
      if (r_try < r) {
        u = u_try;
        f = f_try;
        r = r_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  s.iterations = it;

  if (!(std::isfinite(r) && r <= scaled(opt.accept_tol, u))) {
    // Damped Picard fallback, then a Newton polish from wherever it lands.
    s.method = Method::Picard;
    Vector up = u0;
    Vector fp;
    double rp = safe_residual(model, x, up, fp);
    int k = 0;
    for (; k < opt.picard_steps && std::isfinite(rp) && rp > scaled(opt.tol, up); ++k) {
      up = up - opt.picard_damping * fp;
      rp = safe_residual(model, x, up, fp);
    }
    s.iterations += k;
    if (std::isfinite(rp) && rp < r) {
      u = up;
      r = rp;
      f = fp;
    }
    for (int polish = 0; polish < 5 && std::isfinite(r) && r > scaled(opt.tol, u); ++polish) {
      Matrix a;
      try {
        a = id - model.affection_jacobian(x, u);
      } catch (const expr::EvalError&) {
        break;
      }
      const auto lu = a.partialPivLu();
      if (!(std::fabs(lu.determinant()) > 1e-14)) break;
      Vector f_try;
      const Vector u_try = u + lu.solve(-f);
      const double r_try = safe_residual(model, x, u_try, f_try);
      if (!(r_try < r)) break;
      u = u_try;
      f = f_try;
      r = r_try;
    }
  }

  s.u = u;
  s.residual_norm = r;
  if (std::isfinite(r) && r <= scaled(opt.accept_tol, u)) {
    s.status = Status::Converged;
    try {
      s.det_ImJ = (id - model.affection_jacobian(x, u)).determinant();
    } catch (const expr::EvalError&) {
      s.det_ImJ = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    s.status = singular ? Status::Singular : Status::NoConvergence;
  }
  return s;
}

}  // namespace

ConsistencySolution solve_consistency(const InteractionModel& model, const Vector& x,
                                      const std::optional<Vector>& guess, const ConsistencyOptions& options) {
  const auto n = static_cast<Eigen::Index>(model.players());
  if (x.size() != n) throw std::invalid_argument("solve_consistency: action profile has wrong dimension");
  if (guess && guess->size() != n) throw std::invalid_argument("solve_consistency: guess has wrong dimension");
  const Matrix id = Matrix::Identity(n, n);

  // A guess that is already consistent is returned unchanged.
  if (guess) {
    Vector f;
    const double r = safe_residual(model, x, *guess, f);
    if (r <= scaled(options.tol, *guess)) {
      ConsistencySolution s;
      s.status = Status::Converged;
      s.u = *guess;
      s.residual_norm = r;
      s.iterations = 0;
      s.method = model.linearly_separable() ? Method::ClosedForm : Method::Newton;
      try {
        s.det_ImJ = (id - model.affection_jacobian(x, *guess)).determinant();
      } catch (const expr::EvalError&) {
      }
      s.distinct_limits.push_back(*guess);
      return s;
    }
  }

  if (model.linearly_separable()) {
    ConsistencySolution s = closed_form(model, x);
    if (s.converged()) s.distinct_limits.push_back(s.u);
    return s;
  }

  std::vector<Vector> starts;
  if (guess) starts.push_back(*guess);
  starts.push_back(Vector::Zero(n));
  try {
    starts.push_back(model.evaluate_v(x, Vector::Zero(n)));
  } catch (const expr::EvalError&) {
  }
  if (!guess && starts.size() == 2) std::swap(starts[0], starts[1]);  // default start V_x(0)
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coord(-options.random_box, options.random_box);
  for (std::size_t k = 0; k < options.random_starts; ++k) {
    Vector r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = coord(rng);
    starts.push_back(std::move(r));
  }

  std::optional<ConsistencySolution> first;
  ConsistencySolution best_failure;
  best_failure.residual_norm = std::numeric_limits<double>::infinity();
  std::vector<Vector> limits;
  int total_iterations = 0;
  for (const Vector& start : starts) {
    ConsistencySolution s = newton_from(model, x, start, options);
    total_iterations += s.iterations;
    if (s.converged()) {
      const bool seen = std::any_of(limits.begin(), limits.end(), [&](const Vector& l) {
        return sup_norm(l - s.u) <= options.agreement_tol * std::max(1.0, sup_norm(l));
      });
      if (!seen) limits.push_back(s.u);
      if (!first) first = s;
      if (!options.multistart) break;
    } else if (!(s.residual_norm >= best_failure.residual_norm)) {
      best_failure = s;
    }
  }
  if (first) {
    first->distinct_limits = std::move(limits);
    first->iterations = total_iterations;
    return *first;
  }
  if (!std::isfinite(best_failure.residual_norm) && best_failure.u.size() == 0) best_failure.u = Vector::Zero(n);
  best_failure.iterations = total_iterations;
  return best_failure;
}

PicardResult picard_iterate(const InteractionModel& model, const Vector& x, const Vector& u0, std::size_t kmax,
                            double tol, double blowup) {
  PicardResult out;
  Vector u = u0;
  out.trajectory.push_back(u);
  for (std::size_t k = 0; k < kmax; ++k) {
    Vector next;
    try {
      next = model.evaluate_v(x, u);
    } catch (const expr::EvalError&) {
      out.verdict = PicardVerdict::Diverged;
      out.steps = k;
      out.final_u = u;
      return out;
    }
    const double delta = sup_norm(next - u);
    if (delta <= tol) {
      out.verdict = PicardVerdict::Converged;
      out.steps = k;
      out.final_u = u;
      return out;
    }
    u = std::move(next);
    out.trajectory.push_back(u);
    if (!std::isfinite(sup_norm(u)) || sup_norm(u) > blowup) {
      out.verdict = PicardVerdict::Diverged;
      out.steps = k + 1;
      out.final_u = u;
      return out;
    }
  }
  out.verdict = PicardVerdict::Cycling;
  out.steps = kmax;
  out.final_u = u;
  return out;
}

Matrix induced_gradient(const InteractionModel& model, const Vector& x, const Vector& u) {
  const auto n = static_cast<Eigen::Index>(model.players());
  const Matrix b = (Matrix::Identity(n, n) - model.affection_jacobian(x, u)).partialPivLu().inverse();
  const Vector d = model.own_partials(x, u);
  return b * d.asDiagonal();
}

InducedGameEval induced_game(const InteractionModel& model, const Vector& x, const std::optional<Vector>& guess,
                             const ConsistencyOptions& options) {
  InducedGameEval out;
  out.x = x;
  out.solution = solve_consistency(model, x, guess, options);
  out.u = out.solution.u;
  if (!out.solution.converged()) return out;
  const auto n = static_cast<Eigen::Index>(model.players());
  try {
    out.det_ImJ = (Matrix::Identity(n, n) - model.affection_jacobian(x, out.u)).determinant();
    out.ill_conditioned = std::fabs(out.det_ImJ) < 1e-8;
    out.grad = induced_gradient(model, x, out.u);
  } catch (const expr::EvalError&) {
    return out;
  }
  out.defined = true;
  return out;
}

SeparableGame::SeparableGame(const InteractionModel& model, Matrix affection, Matrix b)
    : model_(&model), affection_(std::move(affection)), b_(std::move(b)) {}

Vector SeparableGame::base(const Vector& x) const {
  const auto n = static_cast<Eigen::Index>(model_->players());
  return model_->evaluate_v(x, Vector::Zero(n));
}

SeparableGame separable_induced(const InteractionModel& model) {
  if (!model.linearly_separable())
    throw NotSeparableError("model is not linearly separable in the utility levels");
  const auto n = static_cast<Eigen::Index>(model.players());
  const Matrix j = model.affection_jacobian(model.window_midpoint(), Vector::Zero(n));
  const Matrix a = Matrix::Identity(n, n) - j;
  const auto lu = a.partialPivLu();
  const double det = lu.determinant();
  if (!(std::fabs(det) > 1e-12)) throw SingularMatrixError("I - J is singular", det);
  return SeparableGame(model, j, lu.inverse());
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Newton: return "newton";
    case Method::Picard: return "picard";
    case Method::ClosedForm: return "closed-form";
  }
  return "";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::NoConvergence: return "no-convergence";
    case Status::Singular: return "singular";
  }
  return "";
}

std::string to_string(PicardVerdict v) {
  switch (v) {
    case PicardVerdict::Converged: return "converged";
    case PicardVerdict::Diverged: return "diverged";
    case PicardVerdict::Cycling: return "cycling";
  }
  return "";
}

}  // namespace affective::solver
