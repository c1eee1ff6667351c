#pragma once

#include <Eigen/Dense>

namespace polyfeas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultRankTolFactor = 1e-12;

/// Split of the left singular basis of A into its image (U1) and the
/// orthogonal complement of the image (U2). Singular values are those above
/// the numerical-rank threshold, nonincreasing.
struct SvdSplit {
  Matrix U1;
  Matrix U2;
  Vector singular_values;
  Matrix V;

  Eigen::Index rank() const { return singular_values.size(); }
};

/// Requires rows >= cols >= 1. Rank counts sigma_i > factor * max(n, m) * sigma_max.
SvdSplit svd_split(const Matrix& A, double rank_tol_factor = kDefaultRankTolFactor);

/// V * diag(1/sigma) * U1^T. Throws RankDeficient when rank < cols(A).
Matrix pseudo_inverse(const Matrix& A, const SvdSplit& split);

bool all_finite(const Matrix& M);

}  // namespace polyfeas
