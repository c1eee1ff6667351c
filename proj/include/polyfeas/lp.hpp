#pragma once

#include <optional>

#include "polyfeas/numerics.hpp"

namespace polyfeas {

/// maximize objective^T y  s.t.  eq_matrix * y = eq_rhs,  lower <= y <= upper.
struct LinearProgram {
  Vector objective;
  Matrix eq_matrix;
  Vector eq_rhs;
  Vector lower;
  Vector upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector y_star;  // empty unless Optimal
  double objective_value = 0.0;
  int iterations = 0;
  /// Simplex multipliers of the equality rows at the final basis (empty unless Optimal).
  Vector duals;
};

inline constexpr double kDefaultLpTol = 1e-9;

enum class LpAlgorithm {
  /// Dual simplex from the objective-favoured corner with bound-flipping
  /// ratio test, finished by a primal cleanup pass.
  Dual,
  /// Two-phase primal simplex on artificial variables.
  Primal,
};

struct LpOptions {
  double tol = kDefaultLpTol;
  /// 0 selects the default cap of 50 * d iterations.
  int max_iterations = 0;
  LpAlgorithm algorithm = LpAlgorithm::Dual;
};

/// Bounded-variable simplex: nonbasic variables rest at one of their bounds,
/// so Optimal solutions are basic (vertex) solutions. Bounds must be finite.
/// The smallest-index rule takes over after 3 * d consecutive degenerate
/// iterations. Throws CycleLimit when the iteration cap is hit.
LpSolution solve(const LinearProgram& lp, const LpOptions& options = {});

inline LpSolution solve(const LinearProgram& lp, double tol) {
  return solve(lp, LpOptions{tol, 0, LpAlgorithm::Dual});
}

/// Checks the shape and bound invariants of a program; throws on violation.
void validate(const LinearProgram& lp);

}  // namespace polyfeas
