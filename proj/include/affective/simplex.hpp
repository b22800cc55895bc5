#pragma once

// Dense two-phase simplex for the small feasibility LPs used by the
// dominant-diagonal test and the welfare-weight search.

#include <vector>

#include "affective/linalg.hpp"

namespace affective::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<double> coefficients;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// maximize objective . z subject to constraints, z >= 0.
struct Problem {
  std::vector<double> objective;
  std::vector<Constraint> constraints;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> z;
  double value = 0.0;
};

/// Bland's rule throughout, so the method terminates on degenerate problems.
Solution solve(const Problem& problem);

}  // namespace affective::lp
