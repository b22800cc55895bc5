#pragma once

// Parametric equilibria: consistent (x*, u*) where every x*_i maximizes
// V_i(., u*_{-i}). These coincide with Nash equilibria of the induced game,
// so verification checks both the parametric inequality and unilateral
// deviations in U.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affective/linalg.hpp"
#include "affective/model.hpp"
#include "affective/solver.hpp"

namespace affective::equilibrium {

struct EquilibriumOptions {
  /// Points per player in the best-reply and deviation grids.
  std::size_t grid = 512;
  int best_reply_rounds = 500;
  int max_newton = 100;
  int max_halvings = 30;
  double newton_tol = 1e-12;
  double consistency_tol = 1e-10;
  double foc_tol = 1e-8;
  /// Allowed gain in V_i(x_i', u*_{-i}) over the candidate.
  double parametric_tol = 1e-9;
  /// Allowed gain in U_i(x_i', x*_{-i}) over the candidate.
  double nash_tol = 1e-7;
};

enum class Status { Verified, NoConvergence, NonMaximum, Unverified };

struct Flags {
  bool consistent = false;
  bool foc = false;
  bool parametric = false;
  bool nash = false;
  bool all() const { return consistent && foc && parametric && nash; }
};

struct Violation {
  /// "consistency", "foc", "parametric" or "nash".
  std::string check;
  std::size_t player = 0;
  /// Deviation action for grid checks; the offending value otherwise.
  double action = 0.0;
  double amount = 0.0;
};

struct VerificationReport {
  Flags flags;
  double consistency_residual = 0.0;
  Vector foc;
  double max_parametric_gain = 0.0;
  double max_nash_gain = 0.0;
  /// Deviations whose consistency solve failed (induced game undefined).
  std::size_t undefined_deviations = 0;
  std::vector<Violation> violations;
};

VerificationReport verify_equilibrium(const InteractionModel& model, const Vector& x, const Vector& u,
                                      const EquilibriumOptions& options = {});

struct EquilibriumResult {
  Status status = Status::NoConvergence;
  Vector x;
  Vector u;
  double consistency_residual = 0.0;
  Vector foc;
  /// d2V_i/dx_i2 at the solution.
  Vector curvature;
  VerificationReport verification;
  /// "newton" or "best-reply".
  std::string method;
  int iterations = 0;

  bool verified() const { return status == Status::Verified; }
};

/// Newton on the stacked system {dV_i/dx_i = 0, u - V(x, u) = 0} from
/// `start`, with best-reply iteration as fallback.
EquilibriumResult find_parametric_equilibrium(const InteractionModel& model, const Vector& start,
                                              const EquilibriumOptions& options = {});

struct BestReply {
  double action = 0.0;
  double value = 0.0;
  /// False when V_i has no interior critical maximum on the grid; action is
  /// then the better window end.
  bool interior = false;
};

/// argmax over x_i of V_i(x_i, u_{-i}); entry u(i) is ignored.
BestReply best_reply(const InteractionModel& model, std::size_t i, const Vector& u,
                     const EquilibriumOptions& options = {});

/// argmax over x_i of the induced utility U_i(x_i, x_{-i}), re-solving
/// consistency along the way.
BestReply coupled_best_reply(const InteractionModel& model, std::size_t i, const Vector& x,
                             const EquilibriumOptions& options = {});

/// Seeded random starts over the model window; returns the verified
/// equilibria with duplicates (within 1e-6) removed, in discovery order.
std::vector<EquilibriumResult> multistart_equilibria(const InteractionModel& model, std::size_t starts = 8,
                                                     std::uint64_t seed = 42, const EquilibriumOptions& options = {});

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct DominanceReport {
  /// cross(i, j) = d2U_i/dx_i dx_j by central differences; the diagonal
  /// holds d2U_i/dx_i2.
  Matrix cross;
  double max_cross = 0.0;
  /// max_i |d2U_i/dx_i2|.
  double scale = 0.0;
  double tolerance = 0.0;
  /// dU_i/dx_i at x* from the induced-game gradient.
  Vector own_gradient;
  bool stationary = false;
  bool passes = false;
  /// Set when the induced game was undefined at a probe point.
  std::optional<Vector> undefined_probe;
};

/// Throws PreconditionError unless eq is verified.
DominanceReport local_dominance_check(const InteractionModel& model, const EquilibriumResult& eq, double h = 1e-4,
                                      double rel_tol = 1e-4);

/// Evenly spaced points lo..hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

std::string to_string(Status s);

}  // namespace affective::equilibrium
