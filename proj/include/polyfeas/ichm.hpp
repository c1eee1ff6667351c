#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "polyfeas/chull.hpp"
#include "polyfeas/errors.hpp"
#include "polyfeas/lp.hpp"
#include "polyfeas/numerics.hpp"

namespace polyfeas {

/// Implicit polytope {x in R^m | A x = B y, y_lo <= y <= y_hi}.
/// A is n x m, B is n x d, with d >= n >= m >= 1.
struct FeasibilityProblem {
  Matrix A;
  Matrix B;
  Vector y_lo;
  Vector y_hi;

  Eigen::Index output_dim() const { return A.cols(); }
  Eigen::Index input_dim() const { return B.cols(); }
};

void validate(const FeasibilityProblem& problem);

/// The explicit LP over y whose optimum is the support point of the polytope
/// in direction c:  max c^T A+ B y  s.t.  U2^T B y = 0,  y_lo <= y <= y_hi.
class ProjectedProgram {
 public:
  struct Support {
    LpStatus status = LpStatus::Infeasible;
    Vector x;  // A+ B y*
    Vector y;
    double value = 0.0;  // c . x
    int iterations = 0;
  };

  /// Throws RankDeficient when A has rank < m.
  explicit ProjectedProgram(const FeasibilityProblem& problem,
                            double rank_tol_factor = kDefaultRankTolFactor);

  Support maximize(const Vector& direction, double lp_tol = kDefaultLpTol) const;

  /// LP whose feasible set is {y : U2^T B y = 0, box, A+ B y = target}.
  LinearProgram pinned(const Vector& target) const;

  const FeasibilityProblem& problem() const { return problem_; }
  const SvdSplit& split() const { return split_; }
  const Matrix& projection() const { return projection_; }
  const Matrix& image_constraint() const { return image_constraint_; }
  Eigen::Index output_dim() const { return problem_.output_dim(); }

 private:
  FeasibilityProblem problem_;
  SvdSplit split_;
  Matrix projection_;        // A+ B, m x d
  Matrix image_constraint_;  // U2^T B, (n - r) x d
};

struct InitialVertices {
  std::vector<Vector> points;
  std::vector<Vector> witnesses;  // y* of each point
  long lp_count = 0;
};

/// Extremes of the polytope along +/- each right singular vector of A,
/// deduplicated. Throws EmptyPolytope if an LP is infeasible and
/// DegeneratePolytope if the points span fewer than m dimensions.
InitialVertices initial_vertices(const ProjectedProgram& program, double lp_tol = kDefaultLpTol);
InitialVertices initial_vertices(const FeasibilityProblem& problem, double lp_tol = kDefaultLpTol);

/// +normal when normal . (witness - centroid) >= 0, else -normal.
Vector orient_normal(const Vector& normal, const Vector& witness, const Vector& centroid);

enum class FaceVerdict { Vertex, OnFace };

struct FaceTest {
  FaceVerdict verdict = FaceVerdict::OnFace;
  double delta = 0.0;  // normal . (witness - x_new)
};

/// Vertex iff |delta| >= eps.
FaceTest face_test(const Vector& normal, const Vector& witness, const Vector& x_new, double eps);

/// LimitReached only appears on the partial result of an IterationLimitError.
enum class PolytopeStatus { Converged, Degenerate, Empty, LimitReached };

const char* to_string(PolytopeStatus status);

struct PolytopeResult {
  /// Hull vertices: ascending for m=1, counter-clockwise for m=2.
  std::vector<Vector> vertices;
  Matrix hrep_normals;  // one row per recorded face
  Vector hrep_offsets;
  double achieved_eps = std::numeric_limits<double>::quiet_NaN();
  long lp_count = 0;
  int iterations = 0;
  PolytopeStatus status = PolytopeStatus::Empty;
  /// Largest |delta| of each pass, in pass order.
  std::vector<double> eps_history;
  long faces_created = 0;
  /// Outward triangles indexing `vertices` (m=3 only).
  std::vector<std::array<std::size_t, 3>> triangles;
};

struct EvaluateLimits {
  int max_iterations = 10000;
  long max_lp = 10'000'000;
};

struct EvaluateOptions {
  EvaluateLimits limits;
  double lp_tol = kDefaultLpTol;
  double rank_tol_factor = kDefaultRankTolFactor;
  /// Worker threads for the per-pass face LPs; results are applied in face order.
  unsigned threads = 1;
  /// Seed for the extra directions tried when the initial vertices are flat.
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// Raised when a limit stops the iteration; carries what was found so far.
class IterationLimitError : public Error {
 public:
  IterationLimitError(PolytopeResult partial, const std::string& what)
      : Error(ErrorKind::IterationLimit, what), partial_(std::move(partial)) {}

  const PolytopeResult& partial() const noexcept { return partial_; }

 private:
  PolytopeResult partial_;
};

/// Iterative convex-hull evaluation of the polytope to accuracy eps (absolute,
/// output units). Returns V-rep and H-rep together.
PolytopeResult evaluate(const FeasibilityProblem& problem, double eps,
                        const EvaluateOptions& options = {});

}  // namespace polyfeas
