#pragma once

#include <array>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include "polyfeas/errors.hpp"
#include "polyfeas/numerics.hpp"

namespace polyfeas {

/// Thrown by HullState::build when the input spans fewer than m dimensions.
class DegenerateInputError : public Error {
 public:
  DegenerateInputError(int achieved_dimension, const std::string& what)
      : Error(ErrorKind::DegenerateInput, what), achieved_dimension_(achieved_dimension) {}

  int achieved_dimension() const noexcept { return achieved_dimension_; }

 private:
  int achieved_dimension_;
};

struct HullFace {
  Vector normal;  // unit length, pointing out of the hull
  double offset = 0.0;  // normal . x == offset on the face plane
  std::size_t witness_vertex = 0;
  std::vector<std::size_t> vertex_indices;  // sorted, into HullState::points()
  long created_generation = 0;
};

/// Relative tolerances, scaled by the bounding-box diagonal of the build set.
inline constexpr double kCoplanarTolFactor = 1e-10;
inline constexpr double kMergeTolFactor = 1e-8;

/// Affine dimension of a point set (0..3), decided greedily with the given
/// absolute distance tolerance.
int affine_dimension(const std::vector<Vector>& points, double tol);

/// Bounding-box diagonal of a point set.
double bbox_diagonal(const std::vector<Vector>& points);

/// Convex hull in R^1, R^2 or R^3 that can grow one point at a time.
///
/// Faces are segments endpoints (m=1), edges (m=2) or triangles (m=3).
/// Every face carries the generation in which it was created: faces from
/// build() are generation 0 and each insert() that changes the hull stamps
/// its replacement faces with the next generation.
class HullState {
 public:
  /// coplanar_tol <= 0 selects kCoplanarTolFactor * bounding-box diagonal.
  static HullState build(const std::vector<Vector>& points, double coplanar_tol = 0.0);

  /// Adds a point. Returns false (and leaves the state untouched) when the
  /// point is inside, on the boundary, or duplicates a stored point.
  bool insert(const Vector& point);

  /// Alive faces created strictly after `since_generation`, in creation order.
  std::vector<HullFace> new_faces(long since_generation) const;
  std::vector<HullFace> faces() const;

  std::vector<std::size_t> vertex_indices() const;
  std::vector<Vector> vertices() const;
  const std::vector<Vector>& points() const { return points_; }
  const Vector& centroid() const { return centroid_; }
  long generation() const { return generation_; }
  int dimension() const { return dim_; }
  double coplanar_tol() const { return tol_; }
  double merge_tol() const { return merge_tol_; }
  std::size_t face_count() const;

  /// Length, area or volume.
  double measure() const;

  /// Outward-oriented (counter-clockwise seen from outside) triangles; m=3 only.
  std::vector<std::array<std::size_t, 3>> triangles() const;
  /// Counter-clockwise boundary cycle; m=2 only.
  const std::vector<std::size_t>& cycle() const { return cycle_; }

 private:
  struct Facet {
    std::array<std::size_t, 3> v{};
    Vector normal;
    double offset = 0.0;
    long generation = 0;
    bool alive = true;
    std::vector<std::size_t> outside;  // conflict list, used during build
  };

  HullState() = default;

  double distance(const Facet& f, const Vector& p) const { return f.normal.dot(p) - f.offset; }
  HullFace to_face(const Facet& f) const;

  void build_1d(std::vector<std::size_t> order);
  void build_2d();
  void build_3d(const std::array<std::size_t, 4>& simplex);

  bool insert_1d(std::size_t index);
  bool insert_2d(std::size_t index);
  // Replaces the faces visible from points_[index], starting the search at
  // `seed`. Orphaned conflict points are redistributed when collect is set.
  // Returns false when the point duplicates a vertex of a visible face.
  bool insert_3d(std::size_t index, std::size_t seed, bool collect);

  Facet make_edge(std::size_t a, std::size_t b, long generation) const;
  std::size_t add_triangle(std::size_t a, std::size_t b, std::size_t c, long generation);
  void retire_triangle(std::size_t f);
  void compact();
  void update_centroid();
  void touch(std::size_t point, int delta);

  int dim_ = 0;
  double tol_ = 0.0;
  double merge_tol_ = 0.0;
  long generation_ = 0;
  std::vector<Vector> points_;
  std::vector<Facet> facets_;
  std::vector<std::size_t> cycle_;  // m=2
  std::unordered_map<std::uint64_t, std::size_t> edges_;  // m=3, directed edge -> facet
  Vector interior_;
  Vector centroid_;
  // m=3: live facets incident to each point, and the sum over hull vertices.
  std::vector<int> incidence_;
  Vector vertex_sum_;
  std::size_t vertex_count_ = 0;
};

inline HullState build(const std::vector<Vector>& points, double coplanar_tol = 0.0) {
  return HullState::build(points, coplanar_tol);
}

/// Value-returning form of HullState::insert.
inline HullState insert(HullState state, const Vector& point) {
  state.insert(point);
  return state;
}

inline std::vector<HullFace> new_faces(const HullState& state, long since_generation) {
  return state.new_faces(since_generation);
}

}  // namespace polyfeas
