#include "polyfeas/ichm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "polyfeas/random.hpp"

namespace polyfeas {

const char* to_string(PolytopeStatus status) {
  switch (status) {
    case PolytopeStatus::Converged: return "Converged";
    case PolytopeStatus::Degenerate: return "Degenerate";
    case PolytopeStatus::Empty: return "Empty";
    case PolytopeStatus::LimitReached: return "LimitReached";
  }
  return "Unknown";
}

void validate(const FeasibilityProblem& problem) {
  const Eigen::Index n = problem.A.rows();
  const Eigen::Index m = problem.A.cols();
  const Eigen::Index d = problem.B.cols();
  if (problem.B.rows() != n) {
    throw Error(ErrorKind::DimensionMismatch, "A and B must have the same row count");
  }
  if (problem.y_lo.size() != d || problem.y_hi.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "box bounds must have one entry per column of B");
  }
  if (!(d >= n && n >= m && m >= 1)) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected d >= n >= m >= 1, got d=" + std::to_string(d) + " n=" +
                    std::to_string(n) + " m=" + std::to_string(m));
  }
  if (!problem.A.allFinite() || !problem.B.allFinite() || !problem.y_lo.allFinite() ||
      !problem.y_hi.allFinite()) {
    throw Error(ErrorKind::NonFinite, "problem data must be finite");
  }
  if ((problem.y_lo.array() > problem.y_hi.array()).any()) {
    throw Error(ErrorKind::InvalidArgument, "y_lo must not exceed y_hi");
  }
}

ProjectedProgram::ProjectedProgram(const FeasibilityProblem& problem, double rank_tol_factor)
    : problem_(problem) {
  validate(problem_);
  split_ = svd_split(problem_.A, rank_tol_factor);
  projection_ = pseudo_inverse(problem_.A, split_) * problem_.B;
  image_constraint_ = split_.U2.transpose() * problem_.B;
}

ProjectedProgram::Support ProjectedProgram::maximize(const Vector& direction,
                                                     double lp_tol) const {
  if (direction.size() != output_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "direction has wrong dimension");
  }
  LinearProgram lp;
  lp.objective = projection_.transpose() * direction;
  lp.eq_matrix = image_constraint_;
  lp.eq_rhs = Vector::Zero(image_constraint_.rows());
  lp.lower = problem_.y_lo;
  lp.upper = problem_.y_hi;
  const LpSolution sol = solve(lp, lp_tol);

  Support out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status == LpStatus::Optimal) {
    out.y = sol.y_star;
    out.x = projection_ * sol.y_star;
    out.value = direction.dot(out.x);
  }
  return out;
}

LinearProgram ProjectedProgram::pinned(const Vector& target) const {
  const Eigen::Index k = image_constraint_.rows();
  const Eigen::Index m = output_dim();
  LinearProgram lp;
  lp.objective = Vector::Zero(problem_.input_dim());
  lp.eq_matrix.resize(k + m, problem_.input_dim());
  lp.eq_matrix << image_constraint_, projection_;
  lp.eq_rhs = Vector::Zero(k + m);
  lp.eq_rhs.tail(m) = target;
  lp.lower = problem_.y_lo;
  lp.upper = problem_.y_hi;
  return lp;
}

namespace {

// Appends points not within merge_tol of an already kept point.
void append_unique(std::vector<Vector>& points, std::vector<Vector>& witnesses, const Vector& x,
                   const Vector& y, double merge_tol) {
  for (const auto& p : points) {
    if ((p - x).norm() <= merge_tol) return;
  }
  points.push_back(x);
  witnesses.push_back(y);
}

double points_scale(const std::vector<Vector>& points) {
  double scale = bbox_diagonal(points);
  for (const auto& p : points) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  return std::max(scale, 1e-300);
}

// Solves +/- each column of `directions`; returns false if any LP is infeasible.
bool probe_directions(const ProjectedProgram& program, const Matrix& directions, double lp_tol,
                      std::vector<Vector>& raw_x, std::vector<Vector>& raw_y, long& lp_count) {
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    for (double sign : {1.0, -1.0}) {
      const auto s = program.maximize(sign * directions.col(i), lp_tol);
      ++lp_count;
      if (s.status != LpStatus::Optimal) return false;
      raw_x.push_back(s.x);
      raw_y.push_back(s.y);
    }
  }
  return true;
}

// Orthonormal basis of the directions normal to the affine span of `points`.
Matrix span_complement(const std::vector<Vector>& points, double tol) {
  const Eigen::Index m = points.front().size();
  Matrix centered(m, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    centered.col(static_cast<Eigen::Index>(i)) = points[i] - points.front();
  }
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeFullU);
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > tol) ++rank;
  return svd.matrixU().rightCols(m - rank);
}

InitialVertices dedup(const std::vector<Vector>& raw_x, const std::vector<Vector>& raw_y,
                      long lp_count) {
  InitialVertices out;
  out.lp_count = lp_count;
  const double merge_tol = kMergeTolFactor * points_scale(raw_x);
  for (std::size_t i = 0; i < raw_x.size(); ++i) {
    append_unique(out.points, out.witnesses, raw_x[i], raw_y[i], merge_tol);
  }
  return out;
}

}  // namespace

InitialVertices initial_vertices(const ProjectedProgram& program, double lp_tol) {
  std::vector<Vector> raw_x, raw_y;
  long lp_count = 0;
  if (!probe_directions(program, program.split().V, lp_tol, raw_x, raw_y, lp_count)) {
    throw Error(ErrorKind::EmptyPolytope,
                "image constraint does not meet the box: polytope is empty");
  }
  InitialVertices out = dedup(raw_x, raw_y, lp_count);
  const Eigen::Index m = program.output_dim();
  const double tol = kCoplanarTolFactor * points_scale(out.points);
  const int dim = affine_dimension(out.points, tol);
  if (dim < m) {
    throw Error(ErrorKind::DegeneratePolytope,
                "initial vertices span affine dimension " + std::to_string(dim) + " < " +
                    std::to_string(m));
  }
  return out;
}

InitialVertices initial_vertices(const FeasibilityProblem& problem, double lp_tol) {
  return initial_vertices(ProjectedProgram(problem), lp_tol);
}

Vector orient_normal(const Vector& normal, const Vector& witness, const Vector& centroid) {
  return normal.dot(witness - centroid) >= 0.0 ? Vector(normal) : Vector(-normal);
}

FaceTest face_test(const Vector& normal, const Vector& witness, const Vector& x_new, double eps) {
  FaceTest t;
  t.delta = normal.dot(witness - x_new);
  t.verdict = std::abs(t.delta) >= eps ? FaceVerdict::Vertex : FaceVerdict::OnFace;
  return t;
}

namespace {

using FaceKey = std::array<std::size_t, 3>;

FaceKey key_of(const HullFace& face) {
  FaceKey key{SIZE_MAX, SIZE_MAX, SIZE_MAX};
  std::copy(face.vertex_indices.begin(), face.vertex_indices.end(), key.begin());
  return key;
}

struct HrepRow {
  Vector normal;
  double offset;
};

// Drops rows whose normals and offsets coincide with an earlier row.
std::vector<HrepRow> dedup_hrep(std::vector<HrepRow> rows, double scale) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return rows[a].normal(0) < rows[b].normal(0); });
  std::vector<bool> drop(rows.size(), false);
  for (std::size_t s = 0; s < order.size(); ++s) {
    const std::size_t i = order[s];
    if (drop[i]) continue;
    for (std::size_t t = s + 1; t < order.size(); ++t) {
      const std::size_t j = order[t];
      if (rows[j].normal(0) - rows[i].normal(0) > 1e-8) break;
      if (drop[j]) continue;
      if ((rows[i].normal - rows[j].normal).norm() < 1e-8 &&
          std::abs(rows[i].offset - rows[j].offset) < 1e-8 * scale) {
        drop[j] = true;
      }
    }
  }
  std::vector<HrepRow> kept;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!drop[i]) kept.push_back(std::move(rows[i]));
  }
  return kept;
}

void fill_vertices(const HullState& hull, PolytopeResult& out) {
  out.vertices.clear();
  out.triangles.clear();
  switch (hull.dimension()) {
    case 1: {
      auto v = hull.vertices();
      std::sort(v.begin(), v.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
      out.vertices = std::move(v);
      break;
    }
    case 2:
      for (std::size_t i : hull.cycle()) out.vertices.push_back(hull.points()[i]);
      break;
    default: {
      const auto idx = hull.vertex_indices();
      std::map<std::size_t, std::size_t> remap;
      for (std::size_t i : idx) {
        remap[i] = out.vertices.size();
        out.vertices.push_back(hull.points()[i]);
      }
      for (const auto& t : hull.triangles()) {
        out.triangles.push_back({remap.at(t[0]), remap.at(t[1]), remap.at(t[2])});
      }
      break;
    }
  }
}

void fill_hrep(std::vector<HrepRow> rows, double scale, Eigen::Index m, PolytopeResult& out) {
  rows = dedup_hrep(std::move(rows), scale);
  out.hrep_normals.resize(static_cast<Eigen::Index>(rows.size()), m);
  out.hrep_offsets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.hrep_normals.row(static_cast<Eigen::Index>(i)) = rows[i].normal.transpose();
    out.hrep_offsets(static_cast<Eigen::Index>(i)) = rows[i].offset;
  }
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

PolytopeResult evaluate(const FeasibilityProblem& problem, double eps,
                        const EvaluateOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorKind::InvalidArgument, "eps must be positive and finite");
  }
  const ProjectedProgram program(problem, options.rank_tol_factor);
  const Eigen::Index m = program.output_dim();

  PolytopeResult result;
  std::vector<Vector> raw_x, raw_y;
  if (!probe_directions(program, program.split().V, options.lp_tol, raw_x, raw_y,
                        result.lp_count)) {
    result.status = PolytopeStatus::Empty;
    return result;
  }
  InitialVertices init = dedup(raw_x, raw_y, result.lp_count);
  int dim = affine_dimension(init.points, kCoplanarTolFactor * points_scale(init.points));
  if (dim < m) {
    // Flat start: try m random orthonormal directions before giving up.
    Rng rng(options.seed);
    Matrix gauss(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) gauss(i, j) = rng.normal();
    }
    const Matrix q = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    if (!probe_directions(program, q, options.lp_tol, raw_x, raw_y, result.lp_count)) {
      result.status = PolytopeStatus::Empty;
      return result;
    }
    init = dedup(raw_x, raw_y, result.lp_count);
    dim = affine_dimension(init.points, kCoplanarTolFactor * points_scale(init.points));
    // Then along the normals of the span found so far.
    while (dim < m) {
      const Matrix normals = span_complement(init.points, kCoplanarTolFactor * points_scale(init.points));
      if (!probe_directions(program, normals, options.lp_tol, raw_x, raw_y, result.lp_count)) {
        result.status = PolytopeStatus::Empty;
        return result;
      }
      init = dedup(raw_x, raw_y, result.lp_count);
      const int grown = affine_dimension(init.points, kCoplanarTolFactor * points_scale(init.points));
      if (grown == dim) break;
      dim = grown;
    }
    if (dim < m) {
      result.status = PolytopeStatus::Degenerate;
      result.vertices = init.points;
      result.hrep_normals.resize(0, m);
      result.hrep_offsets.resize(0);
      return result;
    }
  }

  HullState hull = HullState::build(init.points);
  std::vector<HrepRow> hrep;
  std::map<FaceKey, double> face_delta;
  long processed_generation = -1;

  auto finish = [&](PolytopeStatus status) {
    result.status = status;
    fill_vertices(hull, result);
    fill_hrep(hrep, points_scale(result.vertices), m, result);
    double achieved = 0.0;
    for (const auto& face : hull.faces()) {
      auto it = face_delta.find(key_of(face));
      achieved = std::max(achieved, it == face_delta.end()
                                        ? std::numeric_limits<double>::infinity()
                                        : it->second);
    }
    result.achieved_eps = achieved;
  };

  while (true) {
    const std::vector<HullFace> faces = hull.new_faces(processed_generation);
    processed_generation = hull.generation();
    result.faces_created += static_cast<long>(faces.size());
    if (faces.empty()) break;

    if (result.lp_count + static_cast<long>(faces.size()) > options.limits.max_lp) {
      finish(PolytopeStatus::LimitReached);
      throw IterationLimitError(result, "LP budget of " + std::to_string(options.limits.max_lp) +
                                            " exhausted");
    }

    const Vector centroid = hull.centroid();
    std::vector<Vector> directions(faces.size());
    std::vector<ProjectedProgram::Support> supports(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
      directions[i] =
          orient_normal(faces[i].normal, hull.points()[faces[i].witness_vertex], centroid);
    }
    parallel_for(faces.size(), options.threads, [&](std::size_t i) {
      supports[i] = program.maximize(directions[i], options.lp_tol);
    });
    result.lp_count += static_cast<long>(faces.size());

    double pass_max = 0.0;
    std::vector<Vector> found;
    for (std::size_t i = 0; i < faces.size(); ++i) {
      if (supports[i].status != LpStatus::Optimal) {
        // The box meets the image constraint (initial LPs succeeded), so this
        // cannot happen for a consistent solver.
        throw Error(ErrorKind::Internal, "face LP became infeasible mid-run");
      }
      const Vector& witness = hull.points()[faces[i].witness_vertex];
      const FaceTest t = face_test(directions[i], witness, supports[i].x, eps);
      pass_max = std::max(pass_max, std::abs(t.delta));
      face_delta[key_of(faces[i])] = std::abs(t.delta);
      if (t.verdict == FaceVerdict::OnFace) {
        hrep.push_back({directions[i], directions[i].dot(witness)});
      } else {
        found.push_back(supports[i].x);
      }
    }
    result.eps_history.push_back(pass_max);
    ++result.iterations;

    if (found.empty()) break;
    for (const auto& x : found) hull.insert(x);

    if (result.iterations >= options.limits.max_iterations) {
      finish(PolytopeStatus::LimitReached);
      throw IterationLimitError(result, "iteration limit of " +
                                            std::to_string(options.limits.max_iterations) +
                                            " reached");
    }
  }

  finish(PolytopeStatus::Converged);
  return result;
}

}  // namespace polyfeas
