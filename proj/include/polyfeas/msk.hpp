#pragma once

#include <cstdint>

#include "polyfeas/ichm.hpp"
#include "polyfeas/numerics.hpp"

namespace polyfeas {

inline constexpr double kGravity = 9.81;

/// One posture of a musculoskeletal chain.
struct MuscleSnapshot {
  Matrix jacobian_T;    // n x m
  Matrix moment_arm_T;  // n x d
  Vector f_passive;     // d, Newtons
  Vector f_max;         // d, Newtons
  Vector torque_bias;   // n, gravity plus dynamic torques, Newton-meters

  Eigen::Index joints() const { return moment_arm_T.rows(); }
  Eigen::Index muscles() const { return moment_arm_T.cols(); }
  Eigen::Index outputs() const { return jacobian_T.cols(); }
};

void validate(const MuscleSnapshot& snapshot);

struct BiasForceResult {
  Vector f_bias;
  double kkt_residual = 0.0;
  double objective = 0.0;  // 1/2 F^T P F
  int iterations = 0;
};

inline constexpr double kDefaultQpTol = 1e-9;

/// Minimal-activation muscle forces holding the posture:
///   min 1/2 F^T P F  s.t.  -L^T F = torque_bias,  f_passive <= F <= f_max
/// with P = diag(1 / (f_max - f_passive)^2). Muscles with f_max = f_passive
/// are pinned at f_passive. Throws InfeasibleTorque when no F holds the
/// posture.
BiasForceResult bias_force(const MuscleSnapshot& snapshot, double tol = kDefaultQpTol);

/// Reference solver for small problems: tries every lower/upper/free pattern
/// of the muscle bounds (3^d of them) and keeps the best feasible candidate.
/// Throws ComplexityGuard for d > 12, InfeasibleTorque when no pattern fits.
BiasForceResult bias_force_enumerate(const MuscleSnapshot& snapshot);

/// Residual capacity about the held posture: A = J^T, B = -L^T and
/// y in [0, f_max - f_bias].
FeasibilityProblem residual_problem(const MuscleSnapshot& snapshot, const BiasForceResult& bias);

/// Capacity without removing the bias: J^T f = -L^T F - torque_bias with
/// F in [f_passive, f_max]. The torque bias enters as an extra column of B
/// whose coefficient is fixed to 1.
FeasibilityProblem raw_problem(const MuscleSnapshot& snapshot);

/// Largest c . x over the polytope for a unit direction c. Throws
/// Infeasible when the polytope is empty.
double capacity_along(const FeasibilityProblem& problem, const Vector& direction);

struct AssistShare {
  double human = 0.0;
  double robot = 0.0;
};

/// human = clamp(ratio * capacity, 0, total_load), robot = total_load - human.
AssistShare assist_share(double capacity, double ratio, double total_load);

/// Random snapshot: J^T and L^T uniform on [-1, 1], f_max uniform on
/// [100, 1000] N, zero passive force and torque bias. J^T is redrawn until it
/// has full column rank.
MuscleSnapshot mock_model(std::uint64_t seed, Eigen::Index n, Eigen::Index d, Eigen::Index m);

}  // namespace polyfeas
