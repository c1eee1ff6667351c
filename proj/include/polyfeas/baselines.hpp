#pragma once

#include <cstdint>
#include <vector>

#include "polyfeas/ichm.hpp"
#include "polyfeas/numerics.hpp"

namespace polyfeas {

/// Ray directions from a two-Euler-angle grid: yaw and pitch both step by
/// delta_deg over [0, 360), giving (360 / delta)^2 raw rays.
struct RayGrid {
  double delta_deg = 0.0;
  std::vector<Vector> directions;  // unit vectors in R^3, duplicates removed
  std::size_t raw_count = 0;       // before removing duplicates
};

/// Throws InvalidArgument unless 0 < delta_deg <= 180.
RayGrid ray_grid(double delta_deg);

/// Half-space representation {x : normals * x <= offsets}.
struct Hrep {
  Matrix normals;
  Vector offsets;
};

inline constexpr double kHpsmGuard = 1e6;

/// Facets of the zonotope {B y : lo <= y <= hi}. Every (n-1)-subset of the
/// columns of B spans a candidate hyperplane; both of its orientations are
/// shifted to touch the zonotope. Throws ComplexityGuard when the number of
/// subsets exceeds `guard`, InvalidArgument when n > 6.
Hrep hpsm_hrep(const Matrix& B, const Vector& lo, const Vector& hi, double guard = kHpsmGuard);

/// Vertices of {f : H * JT * f <= offsets} by the dual hull: after moving an
/// interior point to the origin, each row maps to the dual point
/// h_i / (offset_i - h_i . c) and every facet of their hull is a vertex.
/// Throws UnboundedRegion when the region is unbounded, EmptyPolytope or
/// DegeneratePolytope when it has no interior.
std::vector<Vector> exact_force_polytope(const Matrix& JT, const Hrep& torque);

/// The exact pipeline: hpsm_hrep of B then exact_force_polytope through A.
std::vector<Vector> hpsm_exact(const FeasibilityProblem& problem, double guard = kHpsmGuard);

/// One LP per grid ray; returns the distinct optimisers. Requires m = 3.
std::vector<Vector> rsm_approximate(const FeasibilityProblem& problem, const RayGrid& grid,
                                    double lp_tol = kDefaultLpTol);

/// Exact support value max c . x over the polytope for each direction.
/// Throws EmptyPolytope if the polytope is empty.
std::vector<double> support_oracle(const FeasibilityProblem& problem,
                                   const std::vector<Vector>& directions,
                                   double lp_tol = kDefaultLpTol);

/// max over the vertices of c . v (-inf for an empty list).
double hull_support(const std::vector<Vector>& vertices, const Vector& direction);

/// max over directions of (support - hull_support).
double max_underestimation(const std::vector<double>& supports,
                           const std::vector<Vector>& directions,
                           const std::vector<Vector>& vertices);

/// `count` random unit directions in R^m from the given seed.
std::vector<Vector> sample_directions(std::size_t count, Eigen::Index m, std::uint64_t seed);

/// Hull vertices of A^-1 B c over all box corners c. Requires n = m <= 3 and
/// d <= 14 (ComplexityGuard otherwise).
std::vector<Vector> corner_map_oracle(const Matrix& A, const Matrix& B, const Vector& lo,
                                      const Vector& hi);

}  // namespace polyfeas
