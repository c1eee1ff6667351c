#include <doctest.h>

#include <cmath>

#include "polyfeas/baselines.hpp"
#include "polyfeas/errors.hpp"
#include "polyfeas/msk.hpp"
#include "polyfeas/random.hpp"

using namespace polyfeas;

namespace {

MuscleSnapshot two_muscle(double tau) {
  MuscleSnapshot s;
  s.jacobian_T = Matrix::Ones(1, 1);
  s.moment_arm_T = Matrix(1, 2);
  s.moment_arm_T << -1, -1;
  s.f_passive = Vector::Zero(2);
  s.f_max = Vector::Ones(2);
  s.torque_bias = Vector::Constant(1, tau);
  return s;
}

// Small snapshot whose bias torque is reachable: built from a feasible force.
MuscleSnapshot loaded_snapshot(Rng& rng, Eigen::Index n, Eigen::Index d, Eigen::Index m) {
  MuscleSnapshot s;
  s.jacobian_T = rng.uniform_matrix(n, m, -1, 1);
  s.moment_arm_T = rng.uniform_matrix(n, d, -1, 1);
  s.f_passive = rng.uniform_matrix(d, 1, 0, 5).col(0);
  s.f_max = s.f_passive + rng.uniform_matrix(d, 1, 10, 100).col(0);
  Vector F(d);
  for (Eigen::Index j = 0; j < d; ++j) F(j) = rng.uniform(s.f_passive(j), s.f_max(j));
  s.torque_bias = -s.moment_arm_T * F;
  return s;
}

double weighted(const MuscleSnapshot& s, const Vector& F) {
  const Vector w = (s.f_max - s.f_passive).cwiseInverse();
  return 0.5 * (F.cwiseProduct(w)).squaredNorm();
}

}  // namespace

TEST_CASE("zero torque needs zero force") {
  const MuscleSnapshot s = mock_model(1, 7, 20, 3);
  const auto b = bias_force(s);
  CHECK(b.f_bias.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(b.objective == doctest::Approx(0.0));
}

TEST_CASE("two equal muscles share the load") {
  const auto b = bias_force(two_muscle(1.0));
  CHECK(b.f_bias(0) == doctest::Approx(0.5));
  CHECK(b.f_bias(1) == doctest::Approx(0.5));
  CHECK(b.kkt_residual <= 1e-6);
  // Grid search along the feasible segment F0 + F1 = 1.
  double best = INFINITY;
  for (int i = 0; i <= 1000; ++i) {
    const double a = i / 1000.0;
    best = std::min(best, 0.5 * (a * a + (1 - a) * (1 - a)));
  }
  CHECK(b.objective == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("unsustainable torque") {
  try {
    bias_force(two_muscle(3.0));
    FAIL("expected InfeasibleTorque");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleTorque);
  }
  CHECK_THROWS_AS(bias_force_enumerate(two_muscle(3.0)), Error);
}

TEST_CASE("active-set solution matches bound-pattern enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index d = 3 + trial % 4;
    const MuscleSnapshot s = loaded_snapshot(rng, 2, d, 1);
    const auto qp = bias_force(s);
    const auto ref = bias_force_enumerate(s);
    CHECK(qp.objective == doctest::Approx(ref.objective).epsilon(1e-8));
    CHECK(qp.kkt_residual <= 1e-6);
    CHECK((-s.moment_arm_T * qp.f_bias - s.torque_bias).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK((qp.f_bias - s.f_passive).minCoeff() >= -1e-9);
    CHECK((s.f_max - qp.f_bias).minCoeff() >= -1e-9);
  }
}

TEST_CASE("objective never exceeds random feasible points") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const MuscleSnapshot s = loaded_snapshot(rng, 3, 8, 2);
    const auto qp = bias_force(s);
    // Feasible samples: the generating force moved along the null space of L^T.
    Eigen::FullPivLU<Matrix> lu(s.moment_arm_T);
    const Matrix Z = lu.kernel();
    const Vector F0 = qp.f_bias;
    for (int k = 0; k < 50; ++k) {
      const Vector dir = Z * rng.uniform_matrix(Z.cols(), 1, -1, 1).col(0);
      double t = 50.0;
      Vector F = F0 + t * dir;
      while (((F - s.f_passive).minCoeff() < 0 || (s.f_max - F).minCoeff() < 0) && t > 1e-9) {
        t *= 0.5;
        F = F0 + t * dir;
      }
      CHECK(qp.objective <= weighted(s, F) + 1e-9);
    }
  }
}

TEST_CASE("pinned muscle stays at its passive force") {
  MuscleSnapshot s = two_muscle(1.0);
  s.f_passive(1) = 0.25;
  s.f_max(1) = 0.25;
  const auto b = bias_force(s);
  CHECK(b.f_bias(1) == 0.25);
  CHECK(b.f_bias(0) == doctest::Approx(0.75));
}

TEST_CASE("residual problem bounds") {
  const MuscleSnapshot s = mock_model(2, 7, 20, 3);
  const auto b = bias_force(s);
  const auto p = residual_problem(s, b);
  CHECK(p.A == s.jacobian_T);
  CHECK(p.B == -s.moment_arm_T);
  CHECK(p.y_lo == Vector::Zero(20));
  CHECK((p.y_hi - s.f_max).lpNorm<Eigen::Infinity>() <= 1e-12);
  const auto r = evaluate(p, 1.0);
  CHECK(r.status == PolytopeStatus::Converged);
  CHECK(r.vertices.size() >= 4);

  BiasForceResult saturated;
  saturated.f_bias = s.f_max;
  CHECK(residual_problem(s, saturated).y_hi == Vector::Zero(20));
}

TEST_CASE("residual polytope contains the origin") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const MuscleSnapshot s = loaded_snapshot(rng, 4, 10, 2);
    const auto p = residual_problem(s, bias_force(s));
    const ProjectedProgram prog(p);
    CHECK(solve(prog.pinned(Vector::Zero(2))).status == LpStatus::Optimal);
  }
}

TEST_CASE("capacity along axis directions of a cube") {
  FeasibilityProblem cube;
  cube.A = Matrix::Identity(3, 3);
  cube.B = Matrix::Identity(3, 3);
  cube.y_lo = Vector::Zero(3);
  cube.y_hi = Vector::Ones(3);
  Vector e3 = Vector::Zero(3);
  e3(2) = 1;
  CHECK(capacity_along(cube, e3) == doctest::Approx(1.0));
  CHECK(capacity_along(cube, -e3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(capacity_along(cube, 2 * e3), Error);

  FeasibilityProblem empty;
  empty.A = Matrix(2, 1);
  empty.A << 1, 0;
  empty.B = Matrix::Identity(2, 2);
  empty.y_lo = Vector::Constant(2, 1.0);
  empty.y_hi = Vector::Constant(2, 2.0);
  try {
    capacity_along(empty, Vector::Ones(1));
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("capacity agrees with the hull and the support oracle") {
  const MuscleSnapshot s = mock_model(3, 7, 20, 3);
  const auto p = residual_problem(s, bias_force(s));
  Vector e3 = Vector::Zero(3);
  e3(2) = 1;
  const double cap = capacity_along(p, e3);
  CHECK(cap == support_oracle(p, {e3})[0]);
  const auto r = evaluate(p, 0.1);
  double top = -INFINITY;
  for (const auto& v : r.vertices) top = std::max(top, v(2));
  CHECK(top <= cap + 1e-7);
  CHECK(cap - top <= 0.1 + 1e-7);
}

TEST_CASE("raw problem pins the bias column") {
  const MuscleSnapshot s = mock_model(4, 7, 20, 3);
  const auto p = raw_problem(s);
  CHECK(p.B.cols() == 21);
  CHECK(p.y_lo(20) == 1.0);
  CHECK(p.y_hi(20) == 1.0);
  // Zero torque bias: raw and residual capacities coincide.
  Vector e3 = Vector::Zero(3);
  e3(2) = 1;
  CHECK(capacity_along(p, e3) == doctest::Approx(capacity_along(residual_problem(s, bias_force(s)), e3)));
}

TEST_CASE("assist share arithmetic") {
  const auto a = assist_share(200.0, 0.3, 7 * kGravity);
  CHECK(a.human == doctest::Approx(60.0));
  CHECK(a.robot == doctest::Approx(8.67));
  const auto z = assist_share(200.0, 0.0, 68.67);
  CHECK(z.human == 0.0);
  CHECK(z.robot == doctest::Approx(68.67));
  const auto c = assist_share(500.0, 0.5, 68.67);
  CHECK(c.human == doctest::Approx(68.67));
  CHECK(c.robot == doctest::Approx(0.0));
  CHECK_THROWS_AS(assist_share(200.0, 1.5, 10.0), Error);
}

TEST_CASE("mock model is deterministic and well-formed") {
  const auto a = mock_model(9, 7, 20, 3);
  const auto b = mock_model(9, 7, 20, 3);
  CHECK(a.jacobian_T == b.jacobian_T);
  CHECK(a.moment_arm_T == b.moment_arm_T);
  CHECK(a.f_max == b.f_max);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = mock_model(seed, 7, 20 + seed % 5 * 20, 3);
    CHECK(Eigen::FullPivLU<Matrix>(s.jacobian_T).rank() == 3);
    CHECK(s.f_max.minCoeff() >= 100.0);
    CHECK(s.f_max.maxCoeff() <= 1000.0);
    CHECK(s.f_passive == Vector::Zero(s.muscles()));
    CHECK(s.torque_bias == Vector::Zero(7));
    CHECK(s.moment_arm_T.cwiseAbs().maxCoeff() <= 1.0);
  }
}

TEST_CASE("snapshot validation") {
  MuscleSnapshot s = two_muscle(1.0);
  s.f_max(0) = -1.0;
  CHECK_THROWS_AS(validate(s), Error);
  s = two_muscle(1.0);
  s.torque_bias = Vector::Zero(3);
  CHECK_THROWS_AS(validate(s), Error);
}
