#include "polyfeas/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "polyfeas/errors.hpp"

namespace polyfeas {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

void validate(const LinearProgram& lp) {
  const Eigen::Index d = lp.objective.size();
  if (lp.lower.size() != d || lp.upper.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "LP bounds do not match objective length");
  }
  if (lp.eq_matrix.rows() > 0 && lp.eq_matrix.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "LP equality matrix has wrong column count");
  }
  if (lp.eq_rhs.size() != lp.eq_matrix.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "LP equality rhs has wrong length");
  }
  if (lp.eq_matrix.rows() > d) {
    throw Error(ErrorKind::InvalidArgument, "LP has more equality rows than variables");
  }
  if (!lp.objective.allFinite() || !lp.eq_matrix.allFinite() || !lp.eq_rhs.allFinite() ||
      !lp.lower.allFinite() || !lp.upper.allFinite()) {
    throw Error(ErrorKind::NonFinite, "LP data must be finite");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    if (lp.lower(j) > lp.upper(j)) {
      throw Error(ErrorKind::InvalidArgument,
                  "LP lower bound exceeds upper bound at index " + std::to_string(j));
    }
  }
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 64;

// Dense tableau form of the bounded-variable simplex. Columns 0..d-1 are the
// structural variables, d..d+k-1 the phase-1 artificials.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const LpOptions& options)
      : lp_(lp),
        k_(lp.eq_matrix.rows()),
        d_(lp.objective.size()),
        n_(d_ + k_),
        tol_(options.tol),
        algorithm_(options.algorithm),
        max_iterations_(options.max_iterations > 0
                             ? options.max_iterations
                             : 50 * static_cast<int>(std::max<Eigen::Index>(d_, 1))) {
    lo_.resize(n_);
    hi_.resize(n_);
    lo_.head(d_) = lp.lower;
    hi_.head(d_) = lp.upper;
    lo_.tail(k_).setZero();
    hi_.tail(k_).setConstant(std::numeric_limits<double>::infinity());

    opt_tol_ = tol_ * std::max(1.0, lp.objective.lpNorm<Eigen::Infinity>());

    double bound_mag = 0.0;
    for (Eigen::Index j = 0; j < d_; ++j) {
      bound_mag = std::max({bound_mag, std::abs(lp.lower(j)), std::abs(lp.upper(j))});
    }
    double row_scale = k_ > 0 ? lp.eq_rhs.lpNorm<Eigen::Infinity>() : 0.0;
    if (k_ > 0 && d_ > 0) {
      row_scale = std::max(row_scale,
                           lp.eq_matrix.cwiseAbs().rowwise().sum().maxCoeff() * bound_mag);
    }
    feas_tol_ = tol_ * std::max(1.0, row_scale);
  }

  LpSolution run() {
    crash_start();
    LpSolution out;

    Vector phase2 = Vector::Zero(n_);
    phase2.head(d_) = lp_.objective;

    if (k_ > 0 && algorithm_ == LpAlgorithm::Dual) {
      // Artificials are fixed at zero: the start is dual feasible and the
      // dual simplex removes the primal infeasibility they carry.
      hi_.tail(k_).setZero();
      if (!dual_iterate(phase2)) {
        out.status = LpStatus::Infeasible;
        out.iterations = iterations_;
        return out;
      }
      refactor();
    } else if (k_ > 0) {
      Vector phase1 = Vector::Zero(n_);
      phase1.tail(k_).setConstant(-1.0);
      iterate(phase1);
      refactor();
      double infeasibility = 0.0;
      for (Eigen::Index i = 0; i < k_; ++i) infeasibility += x_(d_ + i);
      if (infeasibility > feas_tol_) {
        out.status = LpStatus::Infeasible;
        out.iterations = iterations_;
        return out;
      }
      // Artificials are fixed at zero for phase 2; try to drive basic ones out.
      hi_.tail(k_).setZero();
      for (Eigen::Index i = 0; i < k_; ++i) {
        if (!is_basic_[d_ + i]) x_(d_ + i) = 0.0;
      }
      evict_artificials();
      refactor();
    }

    degenerate_run_ = 0;
    if (!iterate(phase2)) {
      throw Error(ErrorKind::Internal, "LP reported unbounded over a finite box");
    }
    refactor();

    out.status = LpStatus::Optimal;
    out.y_star = x_.head(d_);
    for (Eigen::Index j = 0; j < d_; ++j) {
      out.y_star(j) = std::clamp(out.y_star(j), lo_(j), hi_(j));
    }
    out.objective_value = lp_.objective.dot(out.y_star);
    out.iterations = iterations_;
    out.duals = duals(phase2);
    return out;
  }

 private:
  Matrix original_columns() const {
    Matrix full(k_, n_);
    if (k_ > 0) {
      full.leftCols(d_) = lp_.eq_matrix;
      full.rightCols(k_) = art_sign_.asDiagonal();
    }
    return full;
  }

  // Nonbasic structurals start at the bound favoured by the objective; the
  // artificials absorb the remaining equality residual.
  void crash_start() {
    x_ = Vector::Zero(n_);
    at_upper_.assign(n_, false);
    is_basic_.assign(n_, false);
    for (Eigen::Index j = 0; j < d_; ++j) {
      const bool up = lp_.objective(j) > 0.0;
      x_(j) = up ? hi_(j) : lo_(j);
      at_upper_[j] = up;
    }
    art_sign_ = Vector::Ones(k_);
    basis_.resize(k_);
    if (k_ == 0) {
      tableau_.resize(0, n_);
      return;
    }
    Vector residual = lp_.eq_rhs - lp_.eq_matrix * x_.head(d_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      art_sign_(i) = residual(i) >= 0.0 ? 1.0 : -1.0;
      basis_[i] = d_ + i;
      is_basic_[d_ + i] = true;
      x_(d_ + i) = std::abs(residual(i));
    }
    tableau_ = art_sign_.asDiagonal() * original_columns();
  }

  void refactor() {
    if (k_ == 0) return;
    const Matrix full = original_columns();
    Matrix basis_matrix(k_, k_);
    for (Eigen::Index i = 0; i < k_; ++i) basis_matrix.col(i) = full.col(basis_[i]);
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    tableau_ = lu.solve(full);
    Vector rhs = lp_.eq_rhs;
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (!is_basic_[j] && x_(j) != 0.0) rhs -= full.col(j) * x_(j);
    }
    const Vector beta = lu.solve(rhs);
    for (Eigen::Index i = 0; i < k_; ++i) x_(basis_[i]) = beta(i);
    pivots_since_refactor_ = 0;
  }

  Vector duals(const Vector& cost) const {
    if (k_ == 0) return Vector();
    const Matrix full = original_columns();
    Matrix basis_matrix(k_, k_);
    Vector cb(k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      basis_matrix.col(i) = full.col(basis_[i]);
      cb(i) = cost(basis_[i]);
    }
    return basis_matrix.transpose().partialPivLu().solve(cb);
  }

  void pivot(Eigen::Index row, Eigen::Index entering) {
    const double p = tableau_(row, entering);
    tableau_.row(row) /= p;
    for (Eigen::Index i = 0; i < k_; ++i) {
      if (i == row) continue;
      const double f = tableau_(i, entering);
      if (f != 0.0) tableau_.row(i) -= f * tableau_.row(row);
    }
    const Eigen::Index leaving = basis_[row];
    is_basic_[leaving] = false;
    is_basic_[entering] = true;
    basis_[row] = entering;
    if (++pivots_since_refactor_ >= kRefactorEvery) refactor();
  }

  void evict_artificials() {
    for (Eigen::Index r = 0; r < k_; ++r) {
      if (basis_[r] < d_) continue;
      Eigen::Index best = -1;
      double best_mag = 1e-7;
      for (Eigen::Index j = 0; j < d_; ++j) {
        if (is_basic_[j]) continue;
        const double mag = std::abs(tableau_(r, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; artificial stays basic at zero
      const Eigen::Index leaving = basis_[r];
      x_(leaving) = 0.0;
      at_upper_[leaving] = false;
      pivot(r, best);
    }
  }

  // Dual simplex with bound-flipping ratio test. Requires a dual feasible
  // start; returns false when a row proves the program infeasible.
  bool dual_iterate(const Vector& cost) {
    struct Breakpoint {
      double ratio;
      double alpha;
      Eigen::Index col;
    };
    std::vector<Breakpoint> candidates;
    Vector reduced(n_);
    Vector cb(k_);
    while (true) {
      if (iterations_ >= max_iterations_) {
        throw Error(ErrorKind::CycleLimit,
                    "simplex exceeded " + std::to_string(max_iterations_) + " iterations");
      }
      const bool bland = degenerate_run_ > 3 * std::max<Eigen::Index>(d_, 1);

      Eigen::Index row = -1;
      double worst = feas_tol_;
      for (Eigen::Index i = 0; i < k_; ++i) {
        const Eigen::Index b = basis_[i];
        const double viol = std::max(lo_(b) - x_(b), x_(b) - hi_(b));
        if (viol <= feas_tol_) continue;
        if (bland ? (row < 0 || b < basis_[row]) : viol > worst) {
          worst = viol;
          row = i;
        }
      }
      if (row < 0) return true;

      const Eigen::Index leaving = basis_[row];
      const bool to_lower = x_(leaving) < lo_(leaving);
      const double target = to_lower ? lo_(leaving) : hi_(leaving);
      const double sign = to_lower ? -1.0 : 1.0;  // sign of x_p - target

      for (Eigen::Index i = 0; i < k_; ++i) cb(i) = cost(basis_[i]);
      reduced = cost - tableau_.transpose() * cb;

      candidates.clear();
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (is_basic_[j] || hi_(j) - lo_(j) <= 0.0) continue;
        const double alpha = tableau_(row, j);
        const double s = at_upper_[j] ? -1.0 : 1.0;
        if (alpha * s * sign <= kPivotTol) continue;
        const double dj = std::abs(reduced(j));
        candidates.push_back({dj / std::abs(alpha), std::abs(alpha), j});
      }
      if (candidates.empty()) return false;
      std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        return bland ? a.col < b.col : a.alpha > b.alpha;
      });

      // Pass breakpoints while the dual slope stays positive; passed
      // columns flip to their opposite bound.
      double slope = std::abs(x_(leaving) - target);
      std::size_t chosen = 0;
      if (!bland) {
        while (chosen + 1 < candidates.size()) {
          const auto& c = candidates[chosen];
          const double drop = c.alpha * (hi_(c.col) - lo_(c.col));
          if (slope - drop <= 0.0) break;
          slope -= drop;
          ++chosen;
        }
        const auto& last = candidates[chosen];
        if (chosen + 1 == candidates.size() &&
            slope - last.alpha * (hi_(last.col) - lo_(last.col)) > feas_tol_) {
          return false;
        }
        // Prefer the largest pivot among near-ties at the chosen ratio.
        const double ratio = candidates[chosen].ratio;
        for (std::size_t t = chosen + 1; t < candidates.size(); ++t) {
          if (candidates[t].ratio > ratio + 1e-12) break;
          if (candidates[t].alpha > candidates[chosen].alpha) std::swap(candidates[t], candidates[chosen]);
        }
      }

      for (std::size_t t = 0; t < chosen; ++t) {
        const Eigen::Index j = candidates[t].col;
        const double delta = at_upper_[j] ? lo_(j) - hi_(j) : hi_(j) - lo_(j);
        at_upper_[j] = !at_upper_[j];
        x_(j) = at_upper_[j] ? hi_(j) : lo_(j);
        for (Eigen::Index i = 0; i < k_; ++i) x_(basis_[i]) -= tableau_(i, j) * delta;
      }

      const Eigen::Index entering = candidates[chosen].col;
      const double pivot_value = tableau_(row, entering);
      const double step = (x_(leaving) - target) / pivot_value;
      for (Eigen::Index i = 0; i < k_; ++i) x_(basis_[i]) -= tableau_(i, entering) * step;
      x_(entering) += step;
      x_(leaving) = target;
      at_upper_[leaving] = !to_lower;

      ++iterations_;
      degenerate_run_ = candidates[chosen].ratio <= 1e-12 ? degenerate_run_ + 1 : 0;
      pivot(row, entering);
    }
  }

  // Returns false when the objective is unbounded.
  bool iterate(const Vector& cost) {
    Vector reduced(n_);
    while (true) {
      if (iterations_ >= max_iterations_) {
        throw Error(ErrorKind::CycleLimit,
                    "simplex exceeded " + std::to_string(max_iterations_) + " iterations");
      }
      // Reduced costs c_j - c_B^T T_j.
      Vector cb(k_);
      for (Eigen::Index i = 0; i < k_; ++i) cb(i) = cost(basis_[i]);
      if (k_ > 0) {
        reduced = cost - tableau_.transpose() * cb;
      } else {
        reduced = cost;
      }

      const bool bland = degenerate_run_ > 3 * std::max<Eigen::Index>(d_, 1);
      Eigen::Index entering = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (is_basic_[j] || hi_(j) - lo_(j) <= 0.0) continue;
        const double dj = reduced(j);
        const bool improves = at_upper_[j] ? dj < -opt_tol_ : dj > opt_tol_;
        if (!improves) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          entering = j;
        }
      }
      if (entering < 0) return true;

      const double dir = at_upper_[entering] ? -1.0 : 1.0;
      double step = hi_(entering) - lo_(entering);
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (Eigen::Index i = 0; i < k_; ++i) {
        const double rate = -dir * tableau_(i, entering);
        if (std::abs(rate) <= kPivotTol) continue;
        const Eigen::Index b = basis_[i];
        double limit;
        bool to_upper;
        if (rate < 0.0) {
          limit = (x_(b) - lo_(b)) / (-rate);
          to_upper = false;
        } else {
          if (!std::isfinite(hi_(b))) continue;
          limit = (hi_(b) - x_(b)) / rate;
          to_upper = true;
        }
        limit = std::max(limit, 0.0);
        bool take = limit < step - 1e-12;
        if (!take && limit <= step + 1e-12 && leave_row >= 0) {
          take = bland ? basis_[i] < basis_[leave_row] : std::abs(rate) > leave_pivot;
        }
        if (take) {
          step = std::min(step, limit);
          leave_row = i;
          leave_to_upper = to_upper;
          leave_pivot = std::abs(rate);
        }
      }
      if (!std::isfinite(step)) return false;

      ++iterations_;
      degenerate_run_ = step <= 1e-12 ? degenerate_run_ + 1 : 0;

      for (Eigen::Index i = 0; i < k_; ++i) {
        x_(basis_[i]) -= dir * tableau_(i, entering) * step;
      }
      x_(entering) += dir * step;

      if (leave_row < 0) {
        // Bound flip: the entering variable crosses its whole range.
        at_upper_[entering] = !at_upper_[entering];
        x_(entering) = at_upper_[entering] ? hi_(entering) : lo_(entering);
        continue;
      }
      const Eigen::Index leaving = basis_[leave_row];
      x_(leaving) = leave_to_upper ? hi_(leaving) : lo_(leaving);
      at_upper_[leaving] = leave_to_upper;
      pivot(leave_row, entering);
    }
  }

  const LinearProgram& lp_;
  Eigen::Index k_;
  Eigen::Index d_;
  Eigen::Index n_;
  double tol_;
  LpAlgorithm algorithm_;
  int max_iterations_;
  double opt_tol_ = 0.0;
  double feas_tol_ = 0.0;

  Vector lo_, hi_, x_, art_sign_;
  Matrix tableau_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  int iterations_ = 0;
  int degenerate_run_ = 0;
  int pivots_since_refactor_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const LpOptions& options) {
  validate(lp);
  BoundedSimplex simplex(lp, options);
  return simplex.run();
}

}  // namespace polyfeas
