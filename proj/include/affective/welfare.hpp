#pragma once

// Pareto search around a reference profile, welfare weights lambda >> 0 with
// lambda B >> 0, and the weighted welfare W = sum lambda_i U_i(x).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "affective/linalg.hpp"
#include "affective/model.hpp"

namespace affective::welfare {

struct GridSpec {
  std::size_t per_axis = 64;
  /// Sample size when the model has more than full_grid_max_players players.
  std::size_t random_points = 100000;
  std::uint64_t seed = 42;
  /// A dominating profile must gain more than this in at least one component.
  double strict_tol = 1e-7;
  std::size_t full_grid_max_players = 3;
};

enum class Outcome { NoImprovementFound, ImprovementFound };

struct ParetoWitness {
  /// Grid (or sample) index; the lowest dominating index is reported.
  std::size_t index = 0;
  Vector x;
  Vector u;
  double residual = 0.0;
};

struct AverageComparison {
  double reference_average = 0.0;
  double best_average = 0.0;
  Vector best_x;
  Vector best_u;
  /// best_average > reference_average + strict_tol.
  bool improves = false;
};

struct ParetoCertificate {
  Vector reference_x;
  Vector reference_u;
  GridSpec grid;
  bool full_grid = true;
  Outcome outcome = Outcome::NoImprovementFound;
  std::optional<ParetoWitness> witness;
  /// Grid points with a converged consistency solve.
  std::size_t examined = 0;
  std::size_t skipped = 0;
  AverageComparison average;
};

/// Searches `search_model`'s window for a consistent u that weakly dominates
/// u_ref with one component gaining more than strict_tol. The reference must
/// be consistent for `search_model`.
ParetoCertificate pareto_search(const InteractionModel& search_model, const Vector& x_ref, const Vector& u_ref,
                                const GridSpec& grid = {});

/// u >= ref componentwise with some u_i > ref_i + strict_tol.
bool pareto_dominates(const Vector& u, const Vector& ref, double strict_tol);

struct WelfareWeights {
  /// Sums to one.
  Vector lambda;
  double slack = 0.0;
  Matrix b;
};

/// LP: maximize t s.t. lambda_i >= t, (lambda B)_j >= t, sum lambda = 1.
/// Returns weights iff t* > tol and they pass verify_weights. Throws
/// std::runtime_error on LP failure.
std::optional<WelfareWeights> welfare_weights(const Matrix& b, double tol = 1e-9);

/// min(lambda) > 0 and min(lambda B) > 0 exactly.
bool verify_weights(const Matrix& b, const Vector& lambda);

/// sum lambda_i U_i(x). Throws solver::InducedGameUndefined.
double welfare_value(const InteractionModel& model, const Vector& lambda, const Vector& x);

struct WelfareGridMax {
  Vector argmax;
  double max_value = 0.0;
  double reference_value = 0.0;
  /// max_value - reference_value.
  double gap = 0.0;
  /// max over players of |argmax_i - x_i| in grid cells.
  double cell_distance = 0.0;
  std::size_t examined = 0;
  std::size_t skipped = 0;
};

WelfareGridMax welfare_grid_max(const InteractionModel& model, const Vector& lambda, const Vector& x_ref,
                                const GridSpec& grid = {});

std::string to_string(Outcome o);

}  // namespace affective::welfare
