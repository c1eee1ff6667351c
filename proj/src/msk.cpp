#include "polyfeas/msk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "polyfeas/errors.hpp"
#include "polyfeas/lp.hpp"
#include "polyfeas/random.hpp"

namespace polyfeas {

void validate(const MuscleSnapshot& s) {
  const Eigen::Index n = s.joints(), d = s.muscles(), m = s.outputs();
  if (s.jacobian_T.rows() != n) {
    throw Error(ErrorKind::DimensionMismatch, "jacobian_T and moment_arm_T row counts differ");
  }
  if (s.f_passive.size() != d || s.f_max.size() != d || s.torque_bias.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "snapshot vector lengths do not match");
  }
  if (!(d >= n && n >= m && m >= 1)) {
    throw Error(ErrorKind::DimensionMismatch, "expected d >= n >= m >= 1");
  }
  if (!s.jacobian_T.allFinite() || !s.moment_arm_T.allFinite() || !s.f_passive.allFinite() ||
      !s.f_max.allFinite() || !s.torque_bias.allFinite()) {
    throw Error(ErrorKind::NonFinite, "snapshot data must be finite");
  }
  if ((s.f_passive.array() < 0.0).any() || (s.f_passive.array() > s.f_max.array()).any()) {
    throw Error(ErrorKind::InvalidArgument, "need 0 <= f_passive <= f_max");
  }
}

namespace {

enum class Bound { Lower, Upper, Free };

// Basis of {p : E p = 0} with orthonormal columns.
Matrix null_space(const Matrix& E) {
  const Eigen::Index cols = E.cols();
  if (cols == 0) return Matrix(0, 0);
  if (E.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-12 * std::max<double>(E.rows(), cols) * std::max(sv(0), 1e-300);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

Matrix gather_cols(const Matrix& M, const std::vector<Eigen::Index>& idx) {
  Matrix out(M.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = M.col(idx[j]);
  return out;
}

}  // namespace

BiasForceResult bias_force(const MuscleSnapshot& snapshot, double tol) {
  validate(snapshot);
  const Eigen::Index d = snapshot.muscles();
  const Vector& lo_all = snapshot.f_passive;
  const Vector& hi_all = snapshot.f_max;

  std::vector<Eigen::Index> active, pinned;
  for (Eigen::Index i = 0; i < d; ++i) (hi_all(i) > lo_all(i) ? active : pinned).push_back(i);

  // -L^T F = tau with the pinned muscles moved to the right-hand side.
  const Matrix E_full = -snapshot.moment_arm_T;
  Vector rhs = snapshot.torque_bias;
  for (Eigen::Index i : pinned) rhs -= E_full.col(i) * lo_all(i);
  const Matrix E_act = gather_cols(E_full, active);
  const Eigen::Index k = E_act.cols();
  Vector lo(k), hi(k), weight(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    lo(j) = lo_all(active[j]);
    hi(j) = hi_all(active[j]);
    weight(j) = 1.0 / ((hi(j) - lo(j)) * (hi(j) - lo(j)));
  }
  const double torque_scale =
      std::max({rhs.lpNorm<Eigen::Infinity>(),
                E_full.lpNorm<Eigen::Infinity>() * hi_all.lpNorm<Eigen::Infinity>(), 1.0});

  // Independent rows of the equality: U_r^T E F = U_r^T rhs; the rest must vanish.
  Matrix E;
  Vector b;
  {
    Eigen::JacobiSVD<Matrix> svd(E_act, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut =
        1e-12 * std::max<double>(E_act.rows(), std::max<Eigen::Index>(k, 1)) *
        (sv.size() > 0 ? std::max(sv(0), 1e-300) : 1.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    const Matrix U = svd.matrixU();
    const Vector rest = U.rightCols(U.cols() - rank).transpose() * rhs;
    if (rest.size() > 0 && rest.lpNorm<Eigen::Infinity>() > 1e-9 * torque_scale) {
      throw Error(ErrorKind::InfeasibleTorque,
                  "torque bias lies outside the span of the muscle moment arms");
    }
    E = U.leftCols(rank).transpose() * E_act;
    b = U.leftCols(rank).transpose() * rhs;
  }

  BiasForceResult out;
  Vector F(k);
  if (k > 0) {
    LinearProgram lp;
    lp.objective = Vector::Zero(k);
    lp.eq_matrix = E;
    lp.eq_rhs = b;
    lp.lower = lo;
    lp.upper = hi;
    const LpSolution start = solve(lp, tol);
    if (start.status != LpStatus::Optimal) {
      throw Error(ErrorKind::InfeasibleTorque,
                  "no muscle forces within bounds balance the torque bias");
    }
    F = start.y_star;
  }

  const double range_scale = k > 0 ? (hi - lo).maxCoeff() : 1.0;
  std::vector<Bound> state(static_cast<std::size_t>(k), Bound::Free);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (F(j) - lo(j) <= tol * range_scale) {
      F(j) = lo(j);
      state[j] = Bound::Lower;
    } else if (hi(j) - F(j) <= tol * range_scale) {
      F(j) = hi(j);
      state[j] = Bound::Upper;
    }
  }

  const int max_iterations = 20 * static_cast<int>(k) + 100;
  Vector nu = Vector::Zero(E.rows());
  double dual_violation = 0.0;
  double stationarity = 0.0;
  while (k > 0) {
    if (out.iterations >= max_iterations) {
      throw Error(ErrorKind::CycleLimit, "bias force active set did not converge");
    }
    ++out.iterations;
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (state[j] == Bound::Free) free.push_back(j);
    }
    const Eigen::Index nf = static_cast<Eigen::Index>(free.size());
    const Matrix Ef = gather_cols(E, free);
    Vector gf(nf), wf(nf);
    for (Eigen::Index t = 0; t < nf; ++t) {
      wf(t) = weight(free[t]);
      gf(t) = wf(t) * F(free[t]);
    }

    Vector p = Vector::Zero(nf);
    const Matrix Z = null_space(Ef);
    if (Z.cols() > 0) {
      const Matrix H = Z.transpose() * wf.asDiagonal() * Z;
      p = -Z * H.ldlt().solve(Z.transpose() * gf);
    }

    if (p.size() == 0 || p.lpNorm<Eigen::Infinity>() <= tol * range_scale) {
      nu = Ef.rows() > 0 && nf > 0
               ? Vector(Ef.transpose().completeOrthogonalDecomposition().solve(-gf))
               : Vector::Zero(E.rows());
      stationarity = nf > 0 ? (gf + Ef.transpose() * nu).lpNorm<Eigen::Infinity>() : 0.0;
      const Vector grad = weight.cwiseProduct(F) + E.transpose() * nu;
      Eigen::Index release = -1;
      double worst = 0.0;
      dual_violation = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        double violation = 0.0;
        if (state[j] == Bound::Lower) violation = -grad(j);
        if (state[j] == Bound::Upper) violation = grad(j);
        dual_violation = std::max(dual_violation, violation);
        if (violation > worst) {
          worst = violation;
          release = j;
        }
      }
      const double mult_tol = tol * std::max(weight.cwiseProduct(hi).maxCoeff(), 1e-300);
      if (release < 0 || worst <= mult_tol) break;
      state[release] = Bound::Free;
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    Bound blocking_bound = Bound::Free;
    for (Eigen::Index t = 0; t < nf; ++t) {
      const Eigen::Index j = free[t];
      if (p(t) < 0.0) {
        const double a = (lo(j) - F(j)) / p(t);
        if (a < alpha) {
          alpha = a;
          blocking = j;
          blocking_bound = Bound::Lower;
        }
      } else if (p(t) > 0.0) {
        const double a = (hi(j) - F(j)) / p(t);
        if (a < alpha) {
          alpha = a;
          blocking = j;
          blocking_bound = Bound::Upper;
        }
      }
    }
    alpha = std::max(alpha, 0.0);
    for (Eigen::Index t = 0; t < nf; ++t) F(free[t]) += alpha * p(t);
    if (blocking >= 0) {
      state[blocking] = blocking_bound;
      F(blocking) = blocking_bound == Bound::Lower ? lo(blocking) : hi(blocking);
    }
  }

  out.f_bias = lo_all;
  for (Eigen::Index j = 0; j < k; ++j) out.f_bias(active[j]) = std::clamp(F(j), lo(j), hi(j));
  out.objective = 0.5 * (weight.array() * F.array().square()).sum();
  const double primal =
      (E_full * out.f_bias - snapshot.torque_bias).lpNorm<Eigen::Infinity>() / torque_scale;
  out.kkt_residual = std::max({primal, stationarity, dual_violation});
  return out;
}

BiasForceResult bias_force_enumerate(const MuscleSnapshot& snapshot) {
  validate(snapshot);
  const Eigen::Index d = snapshot.muscles();
  if (d > 12) throw Error(ErrorKind::ComplexityGuard, "enumeration limited to d <= 12");
  const Matrix E = -snapshot.moment_arm_T;
  const Vector& lo = snapshot.f_passive;
  const Vector& hi = snapshot.f_max;
  const double torque_scale =
      std::max({snapshot.torque_bias.lpNorm<Eigen::Infinity>(),
                E.lpNorm<Eigen::Infinity>() * hi.lpNorm<Eigen::Infinity>(), 1.0});

  long patterns = 1;
  for (Eigen::Index i = 0; i < d; ++i) patterns *= 3;
  BiasForceResult best;
  best.objective = std::numeric_limits<double>::infinity();
  Vector F(d);
  for (long code = 0; code < patterns; ++code) {
    std::vector<Eigen::Index> free;
    long c = code;
    bool usable = true;
    for (Eigen::Index i = 0; i < d; ++i, c /= 3) {
      const int pick = static_cast<int>(c % 3);
      if (pick == 2 && hi(i) > lo(i)) {
        free.push_back(i);
      } else if (pick == 2) {
        usable = false;
      } else {
        F(i) = pick == 0 ? lo(i) : hi(i);
      }
    }
    if (!usable) continue;
    Vector r = snapshot.torque_bias;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::find(free.begin(), free.end(), i) == free.end()) r -= E.col(i) * F(i);
    }
    if (!free.empty()) {
      // Minimum weighted-norm solution of E_f F_f = r.
      const Matrix Ef = gather_cols(E, free);
      Vector winv(static_cast<Eigen::Index>(free.size()));
      for (std::size_t t = 0; t < free.size(); ++t) {
        const double range = hi(free[t]) - lo(free[t]);
        winv(static_cast<Eigen::Index>(t)) = range * range;
      }
      const Matrix G = Ef * winv.asDiagonal() * Ef.transpose();
      const Vector lambda = G.completeOrthogonalDecomposition().solve(r);
      const Vector Ff = winv.asDiagonal() * (Ef.transpose() * lambda);
      for (std::size_t t = 0; t < free.size(); ++t) F(free[t]) = Ff(static_cast<Eigen::Index>(t));
    }
    if ((E * F - snapshot.torque_bias).lpNorm<Eigen::Infinity>() > 1e-9 * torque_scale) continue;
    bool inside = true;
    for (Eigen::Index i = 0; i < d && inside; ++i) {
      const double slack = 1e-12 * std::max(hi(i) - lo(i), 1.0);
      inside = F(i) >= lo(i) - slack && F(i) <= hi(i) + slack;
    }
    if (!inside) continue;
    double objective = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (hi(i) > lo(i)) objective += 0.5 * F(i) * F(i) / ((hi(i) - lo(i)) * (hi(i) - lo(i)));
    }
    if (objective < best.objective) {
      best.objective = objective;
      best.f_bias = F.cwiseMax(lo).cwiseMin(hi);
    }
  }
  if (!std::isfinite(best.objective)) {
    throw Error(ErrorKind::InfeasibleTorque, "no bound pattern balances the torque bias");
  }
  best.iterations = static_cast<int>(patterns);
  return best;
}

FeasibilityProblem residual_problem(const MuscleSnapshot& snapshot, const BiasForceResult& bias) {
  validate(snapshot);
  if (bias.f_bias.size() != snapshot.muscles()) {
    throw Error(ErrorKind::DimensionMismatch, "bias force has wrong length");
  }
  FeasibilityProblem p;
  p.A = snapshot.jacobian_T;
  p.B = -snapshot.moment_arm_T;
  p.y_hi = (snapshot.f_max - bias.f_bias).cwiseMax(0.0);
  p.y_lo = Vector::Zero(snapshot.muscles());
  return p;
}

FeasibilityProblem raw_problem(const MuscleSnapshot& snapshot) {
  validate(snapshot);
  const Eigen::Index n = snapshot.joints(), d = snapshot.muscles();
  FeasibilityProblem p;
  p.A = snapshot.jacobian_T;
  p.B.resize(n, d + 1);
  p.B << -snapshot.moment_arm_T, -snapshot.torque_bias;
  p.y_lo.resize(d + 1);
  p.y_hi.resize(d + 1);
  p.y_lo << snapshot.f_passive, 1.0;
  p.y_hi << snapshot.f_max, 1.0;
  return p;
}

double capacity_along(const FeasibilityProblem& problem, const Vector& direction) {
  if (direction.size() != problem.output_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "direction has wrong dimension");
  }
  if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "capacity direction must be a unit vector");
  }
  const ProjectedProgram program(problem);
  const auto s = program.maximize(direction);
  if (s.status != LpStatus::Optimal) {
    throw Error(ErrorKind::Infeasible, "posture cannot be sustained: capacity undefined");
  }
  return s.value;
}

AssistShare assist_share(double capacity, double ratio, double total_load) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "assist ratio must lie in [0, 1]");
  }
  if (!(capacity >= 0.0) || !std::isfinite(capacity) || !std::isfinite(total_load)) {
    throw Error(ErrorKind::InvalidArgument, "capacity must be finite and non-negative");
  }
  AssistShare s;
  s.human = std::clamp(ratio * capacity, 0.0, std::max(total_load, 0.0));
  s.robot = total_load - s.human;
  return s;
}

MuscleSnapshot mock_model(std::uint64_t seed, Eigen::Index n, Eigen::Index d, Eigen::Index m) {
  if (!(d >= n && n >= m && m >= 1)) {
    throw Error(ErrorKind::DimensionMismatch, "mock model needs d >= n >= m >= 1");
  }
  Rng rng(seed);
  MuscleSnapshot s;
  do {
    s.jacobian_T = rng.uniform_matrix(n, m, -1.0, 1.0);
  } while (svd_split(s.jacobian_T).rank() < m);
  s.moment_arm_T = rng.uniform_matrix(n, d, -1.0, 1.0);
  s.f_passive = Vector::Zero(d);
  s.f_max.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) s.f_max(i) = rng.uniform(100.0, 1000.0);
  s.torque_bias = Vector::Zero(n);
  return s;
}

}  // namespace polyfeas
