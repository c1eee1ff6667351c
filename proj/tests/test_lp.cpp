#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "polyfeas/errors.hpp"
#include "polyfeas/lp.hpp"
#include "polyfeas/random.hpp"

using namespace polyfeas;

namespace {

LinearProgram box_lp(const Vector& c, const Matrix& E, const Vector& b, const Vector& lo,
                     const Vector& hi) {
  return LinearProgram{c, E, b, lo, hi};
}

// Best value over all basic solutions: k basic columns, the rest at a bound.
std::optional<double> enumerate_vertices(const LinearProgram& lp) {
  const Eigen::Index d = lp.objective.size();
  const Eigen::Index k = lp.eq_matrix.rows();
  std::optional<double> best;
  for (unsigned basic = 0; basic < (1u << d); ++basic) {
    if (__builtin_popcount(basic) != k) continue;
    std::vector<Eigen::Index> B, N;
    for (Eigen::Index j = 0; j < d; ++j) ((basic >> j) & 1u ? B : N).push_back(j);
    Matrix EB(k, k);
    for (Eigen::Index i = 0; i < k; ++i) EB.col(i) = lp.eq_matrix.col(B[i]);
    Eigen::FullPivLU<Matrix> lu(EB);
    if (k > 0 && !lu.isInvertible()) continue;
    for (unsigned side = 0; side < (1u << N.size()); ++side) {
      Vector y(d);
      Vector rhs = lp.eq_rhs;
      for (std::size_t t = 0; t < N.size(); ++t) {
        y(N[t]) = (side >> t) & 1u ? lp.upper(N[t]) : lp.lower(N[t]);
        if (k > 0) rhs -= lp.eq_matrix.col(N[t]) * y(N[t]);
      }
      if (k > 0) {
        const Vector yb = lu.solve(rhs);
        for (Eigen::Index i = 0; i < k; ++i) y(B[i]) = yb(i);
      }
      bool ok = true;
      for (Eigen::Index j = 0; j < d; ++j) {
        ok &= y(j) >= lp.lower(j) - 1e-9 && y(j) <= lp.upper(j) + 1e-9;
      }
      if (!ok) continue;
      const double v = lp.objective.dot(y);
      if (!best || v > *best) best = v;
    }
  }
  return best;
}

void check_feasible(const LinearProgram& lp, const LpSolution& s, double tol) {
  REQUIRE(s.status == LpStatus::Optimal);
  for (Eigen::Index j = 0; j < s.y_star.size(); ++j) {
    CHECK(s.y_star(j) >= lp.lower(j) - tol);
    CHECK(s.y_star(j) <= lp.upper(j) + tol);
  }
  if (lp.eq_matrix.rows() > 0) {
    CHECK((lp.eq_matrix * s.y_star - lp.eq_rhs).lpNorm<Eigen::Infinity>() <= tol);
  }
  CHECK(s.objective_value == doctest::Approx(lp.objective.dot(s.y_star)));
}

}  // namespace

TEST_CASE("box corner without equalities") {
  Vector c(2);
  c << 1, 0;
  const auto lp = box_lp(c, Matrix(0, 2), Vector(0), Vector::Zero(2), Vector::Ones(2));
  for (auto alg : {LpAlgorithm::Dual, LpAlgorithm::Primal}) {
    const auto s = solve(lp, LpOptions{1e-9, 0, alg});
    check_feasible(lp, s, 1e-9);
    CHECK(s.y_star(0) == doctest::Approx(1.0));
    CHECK(s.objective_value == doctest::Approx(1.0));
  }
}

TEST_CASE("constraint inactive on the objective") {
  Vector c(2);
  c << 1, 0;
  Matrix E(1, 2);
  E << 0, 1;
  const auto lp = box_lp(c, E, Vector::Zero(1), Vector::Zero(2), Vector::Ones(2));
  for (auto alg : {LpAlgorithm::Dual, LpAlgorithm::Primal}) {
    const auto s = solve(lp, LpOptions{1e-9, 0, alg});
    check_feasible(lp, s, 1e-9);
    CHECK(s.y_star(0) == doctest::Approx(1.0));
    CHECK(std::abs(s.y_star(1)) < 1e-12);
  }
}

TEST_CASE("diagonal segment reaches its upper endpoint") {
  Vector c(2);
  c << 1, 1;
  Matrix E(1, 2);
  E << 1, -1;
  const auto lp = box_lp(c, E, Vector::Zero(1), Vector::Zero(2), Vector::Ones(2));
  for (auto alg : {LpAlgorithm::Dual, LpAlgorithm::Primal}) {
    const auto s = solve(lp, LpOptions{1e-9, 0, alg});
    check_feasible(lp, s, 1e-9);
    CHECK(s.objective_value == doctest::Approx(2.0));
    CHECK(s.objective_value == doctest::Approx(*enumerate_vertices(lp)));
  }
}

TEST_CASE("infeasible equality") {
  Matrix E(1, 2);
  E << 1, 1;
  Vector b(1);
  b << 3;
  const auto lp = box_lp(Vector::Ones(2), E, b, Vector::Zero(2), Vector::Ones(2));
  CHECK(solve(lp).status == LpStatus::Infeasible);
  CHECK(solve(lp, LpOptions{1e-9, 0, LpAlgorithm::Primal}).status == LpStatus::Infeasible);
  CHECK_FALSE(enumerate_vertices(lp).has_value());
}

TEST_CASE("validation errors") {
  LinearProgram lp = box_lp(Vector::Ones(2), Matrix(0, 2), Vector(0), Vector::Zero(2),
                            Vector::Ones(2));
  lp.lower(0) = 2.0;
  CHECK_THROWS_AS(solve(lp), Error);
  lp.lower(0) = 0.0;
  lp.upper(1) = std::numeric_limits<double>::infinity();
  try {
    solve(lp);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
  LinearProgram wide = box_lp(Vector::Ones(1), Matrix::Ones(2, 1), Vector::Zero(2),
                              Vector::Zero(1), Vector::Ones(1));
  CHECK_THROWS_AS(solve(wide), Error);
}

TEST_CASE("iteration cap raises CycleLimit") {
  Rng rng(3);
  const Matrix E = rng.uniform_matrix(3, 12, -1, 1);
  const Vector y0 = Vector::Constant(12, 0.5);
  const auto lp = box_lp(rng.uniform_matrix(12, 1, -1, 1).col(0), E, E * y0, Vector::Zero(12),
                         Vector::Ones(12));
  try {
    solve(lp, LpOptions{1e-9, 1, LpAlgorithm::Dual});
    FAIL("expected CycleLimit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CycleLimit);
  }
}

TEST_CASE("random LPs: optimum dominates sampled feasible points and matches enumeration") {
  Rng rng(99);
  int dominated = 0, enumerated = 0, infeasible_agree = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = static_cast<Eigen::Index>(2 + rng.next() % 11);       // 2..12
    const auto k = static_cast<Eigen::Index>(rng.next() % std::min<Eigen::Index>(6, d));  // 0..5
    Vector lo(d), hi(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      lo(j) = rng.uniform(-2, 1);
      hi(j) = lo(j) + rng.uniform(0.1, 3);
    }
    const Matrix E = rng.uniform_matrix(k, d, -1, 1);
    Vector y0(d);
    for (Eigen::Index j = 0; j < d; ++j) y0(j) = rng.uniform(lo(j), hi(j));
    const bool make_infeasible = trial % 10 == 9 && k > 0;
    Vector b = E * y0;
    if (make_infeasible) b(0) = E.row(0).cwiseAbs().dot((hi - lo).cwiseAbs()) + 10.0 + b(0);
    const auto lp = box_lp(rng.uniform_matrix(d, 1, -1, 1).col(0), E, b, lo, hi);

    const auto s = solve(lp);
    const auto p = solve(lp, LpOptions{1e-9, 0, LpAlgorithm::Primal});
    if (make_infeasible) {
      CHECK(s.status == LpStatus::Infeasible);
      CHECK(p.status == LpStatus::Infeasible);
      if (d <= 8) {
        CHECK_FALSE(enumerate_vertices(lp).has_value());
        ++infeasible_agree;
      }
      continue;
    }
    check_feasible(lp, s, 1e-9);
    check_feasible(lp, p, 1e-9);
    CHECK(s.objective_value == doctest::Approx(p.objective_value).epsilon(1e-9));

    // Feasible samples: y0 moved along random null-space directions, kept in the box.
    Matrix Z = Matrix::Identity(d, d);
    if (k > 0) {
      Eigen::FullPivLU<Matrix> lu(E);
      Z = lu.kernel();
    }
    for (int sample = 0; sample < 20; ++sample) {
      Vector dir = Z * rng.uniform_matrix(Z.cols(), 1, -1, 1).col(0);
      double t = 1.0;
      Vector y = y0 + t * dir;
      while (((y.array() < lo.array()) || (y.array() > hi.array())).any() && t > 1e-6) {
        t *= 0.5;
        y = y0 + t * dir;
      }
      if (((y.array() < lo.array()) || (y.array() > hi.array())).any()) y = y0;
      CHECK(s.objective_value >= lp.objective.dot(y) - 1e-8);
      ++dominated;
    }
    if (d <= 8) {
      const auto best = enumerate_vertices(lp);
      REQUIRE(best.has_value());
      CHECK(s.objective_value == doctest::Approx(*best).epsilon(1e-9));
      ++enumerated;
    }
  }
  CHECK(dominated > 0);
  CHECK(enumerated > 100);
  CHECK(infeasible_agree > 5);
}

TEST_CASE("duals satisfy the reduced-cost sign conditions") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 8, k = 3;
    const Matrix E = rng.uniform_matrix(k, d, -1, 1);
    const Vector lo = Vector::Zero(d), hi = Vector::Ones(d);
    const auto lp = box_lp(rng.uniform_matrix(d, 1, -1, 1).col(0), E, E * Vector::Constant(d, 0.5),
                           lo, hi);
    const auto s = solve(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    REQUIRE(s.duals.size() == k);
    const Vector reduced = lp.objective - E.transpose() * s.duals;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (s.y_star(j) > lo(j) + 1e-9 && s.y_star(j) < hi(j) - 1e-9) {
        CHECK(std::abs(reduced(j)) < 1e-8);
      } else if (s.y_star(j) <= lo(j) + 1e-9) {
        CHECK(reduced(j) <= 1e-8);
      } else {
        CHECK(reduced(j) >= -1e-8);
      }
    }
  }
}
