#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "polyfeas/baselines.hpp"
#include "polyfeas/io.hpp"
#include "polyfeas/msk.hpp"

using namespace polyfeas;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("polyfeas_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string(POLYFEAS_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out.string());
  r.err = read_text(err.string());
  return r;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string generic_file(const std::string& name, const std::string& B, const std::string& A = "[[1,0],[0,1]]",
                         const std::string& lo = "[0,0]", const std::string& hi = "[1,1]") {
  return write(name, R"({"schema_version": "1", "kind": "generic", "A": )" + A + R"(, "B": )" + B +
                         R"(, "y_lo": )" + lo + R"(, "y_hi": )" + hi + "}");
}

std::string snapshot_file(const std::string& name, const MuscleSnapshot& s) {
  ProblemFile f;
  f.kind = ProblemKind::Msk;
  f.snapshot = s;
  return write(name, format_problem(f));
}

}  // namespace

TEST_CASE("solve: unit square") {
  const auto r = run("solve " + generic_file("square.json", "[[1,0],[0,1]]") + " --eps 1e-6");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["vertices"].size() == 4);
  CHECK(doc["status"] == "Converged");
}

TEST_CASE("solve: parallelogram vertices") {
  const auto r = run("solve " + generic_file("par.json", "[[1,1],[1,-1]]") + " --eps 1e-6");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["vertices"].size() == 4);
  const std::vector<std::pair<double, double>> expect = {{0, 0}, {1, 1}, {2, 0}, {1, -1}};
  for (const auto& [x, y] : expect) {
    bool found = false;
    for (const auto& v : doc["vertices"]) {
      found |= std::abs(v[0].get<double>() - x) < 1e-9 && std::abs(v[1].get<double>() - y) < 1e-9;
    }
    CHECK(found);
  }
}

TEST_CASE("solve: error exit codes") {
  const auto bad = run("solve " + write("bad.json", "{ not json") + " --eps 1");
  CHECK(bad.code == 2);
  CHECK(nlohmann::json::parse(bad.err)["error"] == "Parse");

  const auto empty = run("solve " + generic_file("empty.json", "[[1,0],[0,1]]", "[[1],[0]]", "[0,1]", "[1,2]") +
                         " --eps 0.1");
  CHECK(empty.code == 3);

  const auto flat = run("solve " + generic_file("flat.json", "[[1,2],[1,2]]") + " --eps 1e-6");
  CHECK(flat.code == 4);

  const auto msk = snapshot_file("mock.json", mock_model(3, 7, 20, 3));
  const auto limit = run("solve " + msk + " --eps 0.001 --max-lp 40");
  CHECK(limit.code == 5);
  CHECK(nlohmann::json::parse(limit.out)["status"] == "LimitReached");

  CHECK(run("solve").code == 2);
  CHECK(run("solve " + (scratch() / "missing.json").string() + " --eps 1").code != 0);
}

TEST_CASE("solve: OFF mesh for a 3-D snapshot") {
  const auto msk = snapshot_file("mesh_src.json", mock_model(4, 7, 20, 3));
  const auto mesh = (scratch() / "hull.off").string();
  const auto r = run("solve " + msk + " --eps 1 --mesh " + mesh + " --format text");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Converged") != std::string::npos);
  std::ifstream in(mesh);
  std::string header;
  long V = 0, F = 0, E = 0;
  in >> header >> V >> F >> E;
  CHECK(header == "OFF");
  CHECK(V >= 4);
  CHECK(F == 2 * V - 4);
}

TEST_CASE("bench: one row per run") {
  const auto csv = (scratch() / "bench.csv").string();
  const auto r = run("bench --d 20,40 --seeds 2 --algorithms ichm,rsm --eps 1,10 --delta 36 --csv " + csv);
  REQUIRE(r.code == 0);
  std::ifstream in(csv);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2 * 2 * (2 + 1));
}

TEST_CASE("capacity: support value and assist split") {
  const MuscleSnapshot s = mock_model(5, 7, 20, 3);
  const auto path = snapshot_file("cap.json", s);
  const auto r = run("capacity " + path + " --direction 0,0,1 --ratio 0.3 --load-kg 7");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  Vector e3 = Vector::Zero(3);
  e3(2) = 1;
  const double expect = support_oracle(residual_problem(s, bias_force(s)), {e3})[0];
  CHECK(doc["capacity_N"].get<double>() == doctest::Approx(expect).epsilon(1e-12));
  const auto share = assist_share(expect, 0.3, 7 * kGravity);
  CHECK(doc["human_N"].get<double>() == doctest::Approx(share.human));
  CHECK(doc["robot_N"].get<double>() == doctest::Approx(share.robot));
  CHECK(doc["human_N"].get<double>() + doc["robot_N"].get<double>() == doctest::Approx(68.67));
}

TEST_CASE("capacity: unsustainable posture") {
  MuscleSnapshot s = mock_model(6, 7, 20, 3);
  s.torque_bias = Vector::Constant(7, 1e6);
  const auto r = run("capacity " + snapshot_file("heavy.json", s));
  CHECK(r.code == 3);
  CHECK(nlohmann::json::parse(r.err)["error"] == "InfeasibleTorque");
}

TEST_CASE("capacity: watch directory streams one line per file") {
  const fs::path dir = scratch() / "watch";
  fs::create_directories(dir);
  for (int i = 0; i < 3; ++i) {
    ProblemFile f;
    f.kind = ProblemKind::Msk;
    f.snapshot = mock_model(10 + i, 7, 20, 3);
    write_problem((dir / ("snap" + std::to_string(i) + ".json")).string(), f);
  }
  const auto r = run("capacity --watch " + dir.string() + " --max-updates 3 --interval-ms 10");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  int count = 0;
  for (std::string line; std::getline(lines, line);) {
    const auto doc = nlohmann::json::parse(line);
    CHECK(doc.contains("capacity_N"));
    ++count;
  }
  CHECK(count == 3);
}

TEST_CASE("selfcheck") {
  const auto ok = run("selfcheck");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  const auto broken = run("selfcheck --inject-fault");
  CHECK(broken.code == 1);
  CHECK(broken.out.find("FAIL") != std::string::npos);
}
