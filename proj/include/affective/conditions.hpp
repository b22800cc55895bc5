#pragma once

// Matrix conditions on the affection Jacobian J_x(u):
//   - I - J is a P-matrix (all principal minors positive),
//   - rho(J) < 1 on J and every principal submatrix (sub-interactions),
//   - I - J has a dominant diagonal for some positive weight vector.
// Model-level checks are sampled over a box, so a positive verdict means
// "holds on the sampled region", never a proof.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affective/linalg.hpp"
#include "affective/model.hpp"

namespace affective::conditions {

inline constexpr double kTolMinor = 1e-10;
inline constexpr double kTolRho = 1e-9;
inline constexpr double kTolLp = 1e-9;

struct PMatrixVerdict {
  bool holds = false;
  /// First principal index set (0-based, by increasing bitmask) whose minor
  /// is <= tolerance.
  std::optional<std::vector<std::size_t>> witness;
  double witness_minor = 0.0;
  /// |witness minor| <= tolerance: a near-singular rather than clearly
  /// negative minor.
  bool marginal = false;
  double min_minor = 0.0;
};

PMatrixVerdict is_p_matrix(const Matrix& a, double tol_minor = kTolMinor);

/// y_i (A y)_i <= 0 for every i. Throws std::invalid_argument for y == 0.
bool reverses_sign(const Matrix& a, const Vector& y);

/// Max eigenvalue modulus. Throws ConvergenceError on QR non-convergence.
double spectral_radius(const Matrix& a);

struct DominantDiagonal {
  /// Weights normalised to sum n; present iff the optimal slack exceeds tol.
  std::optional<Vector> weights;
  double slack = 0.0;
};

/// Maximises s subject to h_i A_ii - sum_{j != i} h_j |A_ij| >= s,
/// sum h = n, h >= 0. Requires a positive diagonal.
DominantDiagonal check_dominant_diagonal(const Matrix& a, double tol_lp = kTolLp);

struct Sampler {
  std::size_t count = 1000;
  std::uint64_t seed = 42;
  /// Utility levels are drawn from [-u_box, u_box]^n.
  double u_box = 10.0;
};

enum class Verdict { HoldsOnSamples, Fails };

struct Witness {
  std::size_t sample = 0;
  Vector x;
  Vector u;
  /// Failing principal index set (0-based) for P-matrix / sub-interaction
  /// failures.
  std::vector<std::size_t> subset;
  /// The violated quantity: the minor, the spectral radius, or the LP slack.
  double value = 0.0;
  bool marginal = false;
  std::string description;
};

struct Extremes {
  double min_minor = 0.0;
  double max_rho = 0.0;
  /// Best dominant-diagonal slack on the worst sample.
  double min_lp_slack = 0.0;
};

struct ConditionReport {
  int assumption = 2;
  std::size_t samples = 0;
  /// Samples where a utility expression left its domain.
  std::size_t skipped = 0;
  Verdict verdict = Verdict::HoldsOnSamples;
  std::optional<Witness> witness;
  Extremes extremes;
  std::uint64_t seed = 42;
  double u_box = 10.0;
};

/// Draws the reproducible (x, u) sample sequence used by all checks.
std::vector<std::pair<Vector, Vector>> draw_samples(const InteractionModel& model, const Sampler& sampler);

/// I - J_x(u) is a P-matrix on every sample. Each positive verdict is fuzzed
/// with 100 random sign-reversal probes; a reversal there throws
/// std::logic_error because it contradicts the P-matrix characterisation.
ConditionReport check_assumption2(const InteractionModel& model, const Sampler& sampler = {});

/// rho(J[S,S]) < 1 - tol for every nonempty S on every sample.
ConditionReport check_assumption4(const InteractionModel& model, const Sampler& sampler = {});

/// I - J_x(u) has a dominant diagonal on every sample.
ConditionReport check_assumption5(const InteractionModel& model, const Sampler& sampler = {});

ConditionReport check_assumption(int id, const InteractionModel& model, const Sampler& sampler = {});

}  // namespace affective::conditions
