#include "polyfeas/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "polyfeas/baselines.hpp"
#include "polyfeas/bench.hpp"
#include "polyfeas/ichm.hpp"
#include "polyfeas/msk.hpp"
#include "polyfeas/random.hpp"

namespace polyfeas {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Largest distance from a point of `from` to its nearest point in `to`.
double directed_gap(const std::vector<Vector>& from, const std::vector<Vector>& to) {
  double worst = 0.0;
  for (const auto& p : from) {
    double nearest = INFINITY;
    for (const auto& q : to) nearest = std::min(nearest, (p - q).norm());
    worst = std::max(worst, nearest);
  }
  return worst;
}

CheckOutcome corner_map_vs_ichm() {
  CheckOutcome c{"corner map vs iterative hull (n=m=3, d=8..10)", true, ""};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const Eigen::Index d = 8 + static_cast<Eigen::Index>(seed % 3);
    FeasibilityProblem p;
    p.A = rng.uniform_matrix(3, 3, -1.0, 1.0) + 2.0 * Matrix::Identity(3, 3);
    p.B = rng.uniform_matrix(3, d, -1.0, 1.0);
    p.y_lo = Vector::Zero(d);
    p.y_hi = Vector::Ones(d);
    const auto exact = corner_map_oracle(p.A, p.B, p.y_lo, p.y_hi);
    const auto approx = evaluate(p, 1e-9).vertices;
    worst = std::max({worst, directed_gap(exact, approx), directed_gap(approx, exact)});
  }
  c.passed = worst <= 1e-6;
  c.detail = fmt("max vertex gap %.3g", worst);
  return c;
}

CheckOutcome hpsm_containment() {
  CheckOutcome c{"zonotope half-spaces contain all corners (n=3, d=6)", true, ""};
  double worst = -INFINITY;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(100 + seed);
    const Matrix B = rng.uniform_matrix(3, 6, -1.0, 1.0);
    const Vector lo = Vector::Zero(6), hi = Vector::Ones(6);
    const Hrep h = hpsm_hrep(B, lo, hi);
    Vector y(6);
    for (int mask = 0; mask < 64; ++mask) {
      for (int j = 0; j < 6; ++j) y(j) = (mask >> j) & 1 ? hi(j) : lo(j);
      worst = std::max(worst, (h.normals * (B * y) - h.offsets).maxCoeff());
    }
  }
  c.passed = worst <= 1e-8;
  c.detail = fmt("max violation %.3g", worst);
  return c;
}

CheckOutcome support_deficit(bool inject_fault) {
  CheckOutcome c{"support deficit <= eps (n=7, d=20, eps=1)", true, ""};
  const double eps = 1.0;
  const auto directions = sample_directions(200, 3, 0x5eed);
  double worst = -INFINITY;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const FeasibilityProblem p = benchmark_problem(seed, 7, 20, 3);
    auto vertices = evaluate(p, eps).vertices;
    if (inject_fault) {
      std::vector<Vector> kept;
      for (std::size_t i = 0; i < vertices.size(); i += 2) kept.push_back(vertices[i]);
      vertices = std::move(kept);
    }
    worst = std::max(worst, max_underestimation(support_oracle(p, directions), directions, vertices));
  }
  c.passed = worst <= eps + 1e-7;
  c.detail = fmt("max deficit %.4g (eps %.3g)", worst, eps);
  return c;
}

CheckOutcome capacity_matches_support() {
  CheckOutcome c{"capacity along e3 equals support value", true, ""};
  Vector e3 = Vector::Zero(3);
  e3(2) = 1.0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FeasibilityProblem p = benchmark_problem(seed, 7, 20, 3);
    const double cap = capacity_along(p, e3);
    const double sup = support_oracle(p, {e3}).front();
    worst = std::max(worst, std::abs(cap - sup));
  }
  c.passed = worst == 0.0;
  c.detail = fmt("max difference %.3g", worst);
  return c;
}

CheckOutcome bias_force_vs_enumeration() {
  CheckOutcome c{"bias force vs bound-pattern enumeration (d<=6)", true, ""};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MuscleSnapshot s = mock_model(seed, 2, 5, 1);
    Rng rng(seed + 1000);
    // A torque reached by some force inside the box, so a bias force exists.
    Vector f(5);
    for (int i = 0; i < 5; ++i) f(i) = rng.uniform(0.0, s.f_max(i));
    s.torque_bias = -s.moment_arm_T * f;
    const auto fast = bias_force(s);
    const auto slow = bias_force_enumerate(s);
    worst = std::max(worst, std::abs(fast.objective - slow.objective));
  }
  c.passed = worst <= 1e-8;
  c.detail = fmt("max objective gap %.3g", worst);
  return c;
}

}  // namespace

std::vector<CheckOutcome> run_selfcheck(const SelfcheckOptions& options) {
  std::vector<CheckOutcome> out;
  auto guarded = [&](auto&& check) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(check aborted)", false, e.what()});
    }
  };
  guarded(corner_map_vs_ichm);
  guarded(hpsm_containment);
  guarded([&] { return support_deficit(options.inject_fault); });
  guarded(capacity_matches_support);
  guarded(bias_force_vs_enumeration);
  return out;
}

void print_checks(std::ostream& out, const std::vector<CheckOutcome>& checks) {
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ')
        << c.detail << '\n';
  }
}

}  // namespace polyfeas
