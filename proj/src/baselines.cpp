#include "polyfeas/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "polyfeas/chull.hpp"
#include "polyfeas/errors.hpp"
#include "polyfeas/lp.hpp"
#include "polyfeas/random.hpp"

namespace polyfeas {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double max_abs(const std::vector<Vector>& points) {
  double s = 0.0;
  for (const auto& p : points) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return s;
}

std::vector<Vector> unique_points(const std::vector<Vector>& points, double tol) {
  std::vector<Vector> out;
  for (const auto& p : points) {
    bool seen = false;
    for (const auto& q : out) {
      if ((p - q).norm() <= tol) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(p);
  }
  return out;
}

std::vector<Vector> hull_vertex_list(const HullState& hull) {
  if (hull.dimension() == 2) {
    std::vector<Vector> out;
    for (std::size_t i : hull.cycle()) out.push_back(hull.points()[i]);
    return out;
  }
  auto out = hull.vertices();
  if (hull.dimension() == 1) {
    std::sort(out.begin(), out.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
  }
  return out;
}

// Offset of the supporting plane c . x <= h of {B y : lo <= y <= hi}.
double zonotope_support(const Vector& c, const Matrix& B, const Vector& lo, const Vector& hi) {
  const Vector proj = B.transpose() * c;
  double h = 0.0;
  for (Eigen::Index j = 0; j < proj.size(); ++j) h += proj(j) * (proj(j) > 0.0 ? hi(j) : lo(j));
  return h;
}

}  // namespace

RayGrid ray_grid(double delta_deg) {
  if (!(delta_deg > 0.0) || delta_deg > 180.0) {
    throw Error(ErrorKind::InvalidArgument, "ray grid step must lie in (0, 180] degrees");
  }
  RayGrid grid;
  grid.delta_deg = delta_deg;
  const int steps = static_cast<int>(std::floor(360.0 / delta_deg + 1e-9));
  const double rad = delta_deg * std::numbers::pi / 180.0;
  std::vector<Vector> raw;
  for (int i = 0; i < steps; ++i) {
    for (int j = 0; j < steps; ++j) {
      const double yaw = i * rad, pitch = j * rad;
      Vector v(3);
      v << std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch);
      raw.push_back(v);
    }
  }
  grid.raw_count = raw.size();
  grid.directions = unique_points(raw, 1e-9);
  return grid;
}

Hrep hpsm_hrep(const Matrix& B, const Vector& lo, const Vector& hi, double guard) {
  const Eigen::Index n = B.rows();
  const Eigen::Index d = B.cols();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "hpsm needs at least one row");
  if (lo.size() != d || hi.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "box bounds must have one entry per column");
  }
  if (!B.allFinite() || !lo.allFinite() || !hi.allFinite()) {
    throw Error(ErrorKind::NonFinite, "hpsm data must be finite");
  }
  if (d < n - 1) throw Error(ErrorKind::DimensionMismatch, "hpsm needs at least n-1 columns");
  const double subsets = binomial(static_cast<int>(d), static_cast<int>(n - 1));
  if (subsets > guard) {
    throw Error(ErrorKind::ComplexityGuard,
                "hpsm would enumerate " + std::to_string(static_cast<long long>(subsets)) +
                    " column subsets");
  }

  const double col_scale = std::max(B.lpNorm<Eigen::Infinity>(), 1e-300);
  std::vector<Vector> normals;
  const int k = static_cast<int>(n - 1);
  if (k == 0) {
    normals.push_back(Vector::Ones(1));
  } else {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    Matrix S(n, k);
    while (true) {
      for (int i = 0; i < k; ++i) S.col(i) = B.col(idx[i]);
      Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullU);
      const auto& sv = svd.singularValues();
      if (sv(k - 1) > 1e-10 * col_scale * std::max<double>(n, 1.0)) {
        Vector c = svd.matrixU().col(n - 1);
        // Canonical sign so parallel subsets produce identical normals.
        Eigen::Index lead = 0;
        c.cwiseAbs().maxCoeff(&lead);
        if (c(lead) < 0.0) c = -c;
        normals.push_back(c);
      }
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == d - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }

  std::sort(normals.begin(), normals.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  });
  std::vector<Vector> kept;
  for (const auto& c : normals) {
    if (!kept.empty() && (kept.back() - c).norm() < 1e-10) continue;
    kept.push_back(c);
  }

  Hrep out;
  out.normals.resize(static_cast<Eigen::Index>(2 * kept.size()), n);
  out.offsets.resize(static_cast<Eigen::Index>(2 * kept.size()));
  Eigen::Index row = 0;
  for (const auto& c : kept) {
    for (double sign : {1.0, -1.0}) {
      const Vector s = sign * c;
      out.normals.row(row) = s.transpose();
      out.offsets(row) = zonotope_support(s, B, lo, hi);
      ++row;
    }
  }
  return out;
}

std::vector<Vector> exact_force_polytope(const Matrix& JT, const Hrep& torque) {
  const Eigen::Index n = JT.rows();
  const Eigen::Index m = JT.cols();
  if (m < 1 || m > 3) throw Error(ErrorKind::InvalidArgument, "force polytope needs 1 <= m <= 3");
  if (torque.normals.cols() != n || torque.offsets.size() != torque.normals.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "torque H-rep does not match J^T");
  }
  const Matrix G_all = torque.normals * JT;
  const double offset_scale = std::max(torque.offsets.lpNorm<Eigen::Infinity>(), 1.0);

  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < G_all.rows(); ++i) {
    if (G_all.row(i).norm() > 1e-12 * std::max(G_all.lpNorm<Eigen::Infinity>(), 1e-300)) {
      rows.push_back(i);
    } else if (torque.offsets(i) < -1e-9 * offset_scale) {
      throw Error(ErrorKind::EmptyPolytope, "a constant row of the H-rep is violated");
    }
  }
  const Eigen::Index k = static_cast<Eigen::Index>(rows.size());
  if (k <= m) throw Error(ErrorKind::UnboundedRegion, "too few half-spaces to bound the region");
  Matrix G(k, m);
  Vector h(k), w(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    G.row(i) = G_all.row(rows[i]);
    h(i) = torque.offsets(rows[i]);
    w(i) = G.row(i).norm();
  }

  // Chebyshev centre via its dual: max -h.l s.t. G^T l = 0, w.l = 1, l >= 0.
  LinearProgram lp;
  lp.objective = -h;
  lp.eq_matrix.resize(m + 1, k);
  lp.eq_matrix.topRows(m) = G.transpose();
  lp.eq_matrix.row(m) = w.transpose();
  lp.eq_rhs = Vector::Zero(m + 1);
  lp.eq_rhs(m) = 1.0;
  lp.lower = Vector::Zero(k);
  lp.upper = w.cwiseInverse();
  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorKind::UnboundedRegion, "no positive combination of the rows vanishes");
  }
  const Vector centre = -sol.duals.head(m);
  const double radius = -sol.duals(m);
  if (radius < -1e-9 * offset_scale) throw Error(ErrorKind::EmptyPolytope, "H-rep is infeasible");
  if (radius <= 1e-9 * offset_scale) {
    throw Error(ErrorKind::DegeneratePolytope, "H-rep region has no interior");
  }

  std::vector<Vector> dual_points;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double gap = h(i) - G.row(i).dot(centre);
    dual_points.push_back(G.row(i).transpose() / gap);
  }
  HullState hull = [&] {
    try {
      return HullState::build(dual_points);
    } catch (const DegenerateInputError&) {
      throw Error(ErrorKind::UnboundedRegion, "dual points are flat: region is unbounded");
    }
  }();

  std::vector<Vector> vertices;
  for (const auto& face : hull.faces()) {
    if (face.offset <= 0.0) {
      throw Error(ErrorKind::UnboundedRegion, "dual hull does not enclose the origin");
    }
    vertices.push_back(centre + face.normal / face.offset);
  }
  const double scale = std::max(max_abs(vertices), 1.0);
  return unique_points(vertices, 1e-9 * scale);
}

std::vector<Vector> hpsm_exact(const FeasibilityProblem& problem, double guard) {
  validate(problem);
  const Hrep zono = hpsm_hrep(problem.B, problem.y_lo, problem.y_hi, guard);
  return exact_force_polytope(problem.A, zono);
}

std::vector<Vector> rsm_approximate(const FeasibilityProblem& problem, const RayGrid& grid,
                                    double lp_tol) {
  const ProjectedProgram program(problem);
  if (program.output_dim() != 3) throw Error(ErrorKind::InvalidArgument, "rsm requires m = 3");
  std::vector<Vector> points;
  for (const auto& c : grid.directions) {
    const auto s = program.maximize(c, lp_tol);
    if (s.status != LpStatus::Optimal) {
      throw Error(ErrorKind::EmptyPolytope, "ray LP infeasible: polytope is empty");
    }
    points.push_back(s.x);
  }
  const double scale = std::max(bbox_diagonal(points), max_abs(points));
  return unique_points(points, kMergeTolFactor * std::max(scale, 1e-300));
}

std::vector<double> support_oracle(const FeasibilityProblem& problem,
                                   const std::vector<Vector>& directions, double lp_tol) {
  const ProjectedProgram program(problem);
  std::vector<double> out;
  out.reserve(directions.size());
  for (const auto& c : directions) {
    const auto s = program.maximize(c, lp_tol);
    if (s.status != LpStatus::Optimal) {
      throw Error(ErrorKind::EmptyPolytope, "support LP infeasible: polytope is empty");
    }
    out.push_back(s.value);
  }
  return out;
}

double hull_support(const std::vector<Vector>& vertices, const Vector& direction) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) h = std::max(h, direction.dot(v));
  return h;
}

double max_underestimation(const std::vector<double>& supports,
                           const std::vector<Vector>& directions,
                           const std::vector<Vector>& vertices) {
  if (supports.size() != directions.size()) {
    throw Error(ErrorKind::DimensionMismatch, "one support value per direction expected");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < directions.size(); ++i) {
    worst = std::max(worst, supports[i] - hull_support(vertices, directions[i]));
  }
  return worst;
}

std::vector<Vector> sample_directions(std::size_t count, Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(rng.unit_vector(m));
  return out;
}

std::vector<Vector> corner_map_oracle(const Matrix& A, const Matrix& B, const Vector& lo,
                                      const Vector& hi) {
  const Eigen::Index n = A.rows();
  const Eigen::Index d = B.cols();
  if (A.cols() != n || n < 1 || n > 3 || B.rows() != n) {
    throw Error(ErrorKind::DimensionMismatch, "corner map needs square A with n = m <= 3");
  }
  if (lo.size() != d || hi.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "box bounds must have one entry per column");
  }
  if (d > 14) {
    throw Error(ErrorKind::ComplexityGuard,
                "corner enumeration limited to d <= 14, got " + std::to_string(d));
  }
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorKind::RankDeficient, "A is not invertible");
  const Matrix M = lu.solve(B);

  std::vector<Vector> points;
  points.reserve(std::size_t{1} << d);
  Vector y(d);
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    for (Eigen::Index j = 0; j < d; ++j) y(j) = (mask >> j) & 1u ? hi(j) : lo(j);
    points.push_back(M * y);
  }
  return hull_vertex_list(HullState::build(points));
}

}  // namespace polyfeas
