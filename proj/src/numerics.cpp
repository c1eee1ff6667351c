#include "polyfeas/numerics.hpp"

#include <algorithm>
#include <string>

#include "polyfeas/errors.hpp"

namespace polyfeas {

bool all_finite(const Matrix& M) { return M.allFinite(); }

SvdSplit svd_split(const Matrix& A, double rank_tol_factor) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = A.cols();
  if (m < 1 || n < m) {
    throw Error(ErrorKind::DimensionMismatch,
                "svd_split expects n >= m >= 1, got " + std::to_string(n) + "x" +
                    std::to_string(m));
  }
  if (!A.allFinite()) throw Error(ErrorKind::NonFinite, "svd_split: matrix has NaN/Inf");

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double threshold =
      rank_tol_factor * static_cast<double>(std::max(n, m)) * sigma_max;

  Eigen::Index r = 0;
  while (r < sigma.size() && sigma(r) > threshold) ++r;

  SvdSplit split;
  split.U1 = svd.matrixU().leftCols(r);
  split.U2 = svd.matrixU().rightCols(n - r);
  split.singular_values = sigma.head(r);
  split.V = svd.matrixV().leftCols(r);
  return split;
}

Matrix pseudo_inverse(const Matrix& A, const SvdSplit& split) {
  if (split.rank() < A.cols()) {
    throw Error(ErrorKind::RankDeficient,
                "pseudo_inverse: rank " + std::to_string(split.rank()) + " < " +
                    std::to_string(A.cols()) + " columns");
  }
  return split.V * split.singular_values.cwiseInverse().asDiagonal() *
         split.U1.transpose();
}

}  // namespace polyfeas
