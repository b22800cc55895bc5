#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affective/linalg.hpp"
#include "affective/model.hpp"

namespace affective::solver {

enum class Method { Newton, Picard, ClosedForm };
enum class Status { Converged, NoConvergence, Singular };

struct ConsistencyOptions {
  /// Newton stops once ||F||_inf <= tol * max(1, ||u||_inf).
  double tol = 1e-12;
  /// A solution is reported converged when ||F||_inf <= accept_tol * max(1, ||u||_inf).
  double accept_tol = 1e-10;
  int max_newton = 100;
  int max_halvings = 30;
  int picard_steps = 5000;
  double picard_damping = 0.5;
  /// Run every start and compare limits; when false, later starts are only
  /// tried after earlier ones fail.
  bool multistart = true;
  std::size_t random_starts = 4;
  double random_box = 10.0;
  std::uint64_t seed = 42;
  /// Converged limits closer than this count as one solution.
  double agreement_tol = 1e-8;
};

struct ConsistencySolution {
  Status status = Status::NoConvergence;
  Vector u;
  /// ||u - V_x(u)||_inf at the returned u (the best residual on failure).
  double residual_norm = 0.0;
  int iterations = 0;
  Method method = Method::Newton;
  double det_ImJ = 0.0;
  /// Distinct converged limits across starts (multi-start only).
  std::vector<Vector> distinct_limits;

  bool converged() const { return status == Status::Converged; }
  bool starts_agree() const { return distinct_limits.size() <= 1; }
};

/// Solves u = V_x(u). Without a guess the default start is V_x(0).
/// Linearly separable models use the exact solve u = (I - J)^{-1} f(x).
ConsistencySolution solve_consistency(const InteractionModel& model, const Vector& x,
                                      const std::optional<Vector>& guess = std::nullopt,
                                      const ConsistencyOptions& options = {});

enum class PicardVerdict { Converged, Diverged, Cycling };

struct PicardResult {
  PicardVerdict verdict = PicardVerdict::Cycling;
  /// u0 followed by every iterate.
  std::vector<Vector> trajectory;
  std::size_t steps = 0;
  Vector final_u;
};

/// Undamped re-assessment u <- V_x(u). Converged when successive iterates
/// differ by <= tol in sup norm; diverged once ||u||_inf exceeds blowup.
PicardResult picard_iterate(const InteractionModel& model, const Vector& x, const Vector& u0,
                            std::size_t kmax = 10000, double tol = 1e-12, double blowup = 1e8);

struct InducedGameEval {
  bool defined = false;
  Vector x;
  Vector u;
  /// grad(i, j) = dU_i/dx_j = ((I - J)^{-1})_ij * dV_j/dx_j.
  Matrix grad;
  double det_ImJ = 0.0;
  /// |det(I - J)| < 1e-8 at the solution.
  bool ill_conditioned = false;
  ConsistencySolution solution;
};

/// The induced game at x: U(x) as the consistent utility profile and its
/// gradient from the implicit function theorem. Reports defined == false
/// when no start converges.
InducedGameEval induced_game(const InteractionModel& model, const Vector& x,
                             const std::optional<Vector>& guess = std::nullopt,
                             const ConsistencyOptions& options = {});

/// Gradient of the induced game at a consistent pair (x, u).
Matrix induced_gradient(const InteractionModel& model, const Vector& x, const Vector& u);

/// The consistency equation has no solution found at the given actions.
class InducedGameUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSeparableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double det) : std::runtime_error(what), det_(det) {}
  double det() const { return det_; }

 private:
  double det_;
};

/// Linearly separable interaction V_i = f_i(x_i) + sum_j a_ij u_j with its
/// induced game U(x) = B f(x), B = (I - J)^{-1}.
class SeparableGame {
 public:
  SeparableGame(const InteractionModel& model, Matrix affection, Matrix b);

  const Matrix& affection() const { return affection_; }
  const Matrix& b() const { return b_; }
  Vector base(const Vector& x) const;
  Vector utilities(const Vector& x) const { return b_ * base(x); }

 private:
  const InteractionModel* model_;
  Matrix affection_;
  Matrix b_;
};

/// Throws NotSeparableError or SingularMatrixError (|det(I - J)| <= 1e-12).
/// The returned game refers to `model`, which must outlive it.
SeparableGame separable_induced(const InteractionModel& model);

std::string to_string(Method m);
std::string to_string(Status s);
std::string to_string(PicardVerdict v);

}  // namespace affective::solver
