#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "polyfeas/bench.hpp"
#include "polyfeas/errors.hpp"
#include "polyfeas/io.hpp"
#include "polyfeas/random.hpp"

using namespace polyfeas;

namespace {

void expect_parse_error(const std::string& text) {
  try {
    parse_problem(text);
    FAIL("expected Parse error for: " << text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }
}

}  // namespace

TEST_CASE("problem files round-trip bit for bit") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ProblemFile f;
    f.problem.A = rng.uniform_matrix(3, 2, -1e3, 1e3);
    f.problem.B = rng.uniform_matrix(3, 7, -1, 1) * 1e-7;
    f.problem.y_lo = -rng.uniform_matrix(7, 1, 0, 1).col(0);
    f.problem.y_hi = rng.uniform_matrix(7, 1, 0, 1).col(0) / 3.0;
    f.epsilon = 0.1;
    f.seed = 123456789012345ULL;
    const auto g = parse_problem(format_problem(f));
    CHECK(g.problem.A == f.problem.A);
    CHECK(g.problem.B == f.problem.B);
    CHECK(g.problem.y_lo == f.problem.y_lo);
    CHECK(g.problem.y_hi == f.problem.y_hi);
    CHECK(*g.epsilon == *f.epsilon);
    CHECK(*g.seed == *f.seed);
  }
  ProblemFile m;
  m.kind = ProblemKind::Msk;
  m.snapshot = mock_model(3, 7, 20, 3);
  const auto back = parse_problem(format_problem(m));
  CHECK(back.kind == ProblemKind::Msk);
  CHECK(back.snapshot.moment_arm_T == m.snapshot.moment_arm_T);
  CHECK(back.snapshot.f_max == m.snapshot.f_max);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("malformed problem files") {
  expect_parse_error("{");
  expect_parse_error("[1, 2]");
  expect_parse_error(R"({"A": [[1]], "B": [[1]], "y_lo": [0]})");
  expect_parse_error(R"({"A": [[1]], "B": [[1]], "y_lo": [NaN], "y_hi": [1]})");
  expect_parse_error(R"({"A": [[1, 0], [0]], "B": [[1], [1]], "y_lo": [0], "y_hi": [1]})");
  expect_parse_error(R"({"A": [[1]], "B": [[1, 2]], "y_lo": [0], "y_hi": [1]})");
  expect_parse_error(R"({"A": [[1]], "B": [[1]], "y_lo": [2], "y_hi": [1]})");
  expect_parse_error(R"({"A": [[1]], "B": [[1]], "y_lo": ["0"], "y_hi": [1]})");
  expect_parse_error(R"({"kind": "other"})");
  expect_parse_error(R"({"schema_version": "9", "A": [[1]], "B": [[1]], "y_lo": [0], "y_hi": [1]})");
  expect_parse_error(R"({"A": [[1]], "B": [[1]], "y_lo": [0], "y_hi": [1], "epsilon": -1})");
  expect_parse_error(R"({"A": [[1]], "B": [[1]], "y_lo": [0], "y_hi": [1e999]})");
}

TEST_CASE("result JSON carries every field") {
  FeasibilityProblem p;
  p.A = Matrix::Identity(2, 2);
  p.B = Matrix::Identity(2, 2);
  p.y_lo = Vector::Zero(2);
  p.y_hi = Vector::Ones(2);
  const auto r = evaluate(p, 1e-6);
  const auto doc = nlohmann::json::parse(format_result(r, 42));
  CHECK(doc["status"] == "Converged");
  CHECK(doc["vertices"].size() == 4);
  CHECK(doc["hrep"]["normals"].size() == 4);
  CHECK(doc["hrep"]["offsets"].size() == 4);
  CHECK(doc["lp_count"].get<int>() == r.lp_count);
  CHECK(doc["iterations"].get<int>() == r.iterations);
  CHECK(doc["achieved_eps"].get<double>() == r.achieved_eps);
  CHECK(doc["seed"].get<int>() == 42);
}

TEST_CASE("OFF export of a 3-D polytope") {
  const auto p = benchmark_problem(2, 7, 20, 3);
  const auto r = evaluate(p, 1.0);
  std::ostringstream out;
  write_off(out, r);
  std::istringstream in(out.str());
  std::string header;
  long V = 0, F = 0, E0 = 0;
  in >> header >> V >> F >> E0;
  CHECK(header == "OFF");
  CHECK(V == static_cast<long>(r.vertices.size()));
  std::vector<Vector> verts(V, Vector(3));
  for (auto& v : verts) in >> v(0) >> v(1) >> v(2);
  Vector centroid = Vector::Zero(3);
  for (const auto& v : verts) centroid += v;
  centroid /= static_cast<double>(V);
  std::set<std::pair<long, long>> edges;
  std::set<long> used;
  for (long f = 0; f < F; ++f) {
    int k = 0;
    long a = 0, b = 0, c = 0;
    in >> k >> a >> b >> c;
    CHECK(k == 3);
    used.insert({a, b, c});
    edges.insert({std::min(a, b), std::max(a, b)});
    edges.insert({std::min(b, c), std::max(b, c)});
    edges.insert({std::min(a, c), std::max(a, c)});
    // Outward: the triangle normal points away from the centroid.
    const Eigen::Vector3d u = verts[b] - verts[a], w = verts[c] - verts[a];
    const Vector n = u.cross(w);
    CHECK(n.dot(verts[a] - centroid) > 0);
  }
  CHECK(V - static_cast<long>(edges.size()) + F == 2);
  CHECK(static_cast<long>(used.size()) == V);

  PolytopeResult flat;
  flat.vertices = {Vector::Zero(2)};
  CHECK_THROWS_AS(write_off(out, flat), Error);
}
