#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyfeas/baselines.hpp"
#include "polyfeas/bench.hpp"
#include "polyfeas/errors.hpp"
#include "polyfeas/ichm.hpp"
#include "polyfeas/io.hpp"
#include "polyfeas/msk.hpp"
#include "polyfeas/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace polyfeas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitLimit = 5;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return kExitParse;
    case ErrorKind::EmptyPolytope:
    case ErrorKind::InfeasibleTorque:
    case ErrorKind::Infeasible: return kExitEmpty;
    case ErrorKind::DegeneratePolytope:
    case ErrorKind::DegenerateInput: return kExitDegenerate;
    case ErrorKind::IterationLimit:
    case ErrorKind::CycleLimit: return kExitLimit;
    default: return kExitFailure;
  }
}

int report_error(const std::string& kind, const std::string& message, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

int report_error(const Error& e) {
  return report_error(to_string(e.kind()), e.what(), exit_code_for(e.kind()));
}

unsigned default_threads() {
  if (const char* env = std::getenv("POLYFEAS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorKind::Parse, "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void write_text_or_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

std::string text_summary(const PolytopeResult& r) {
  std::ostringstream out;
  out << "status        " << to_string(r.status) << '\n'
      << "vertices      " << r.vertices.size() << '\n'
      << "faces (H-rep) " << r.hrep_offsets.size() << '\n'
      << "achieved eps  " << format_double(r.achieved_eps) << '\n'
      << "LPs solved    " << r.lp_count << '\n'
      << "iterations    " << r.iterations << '\n';
  return out.str();
}

struct SolveArgs {
  std::string input;
  std::string output;
  std::string mesh;
  double eps = 0.0;
  std::uint64_t seed = EvaluateOptions{}.seed;
  long max_lp = EvaluateLimits{}.max_lp;
  int max_iterations = EvaluateLimits{}.max_iterations;
  unsigned threads = 0;
  std::string format = "json";
};

int cmd_solve(const SolveArgs& args, bool seed_given) {
  const ProblemFile file = read_problem(args.input);
  double eps = args.eps > 0.0 ? args.eps : file.epsilon.value_or(0.0);
  if (!(eps > 0.0)) throw Error(ErrorKind::Parse, "no epsilon: pass --eps or set it in the file");

  FeasibilityProblem problem = file.problem;
  if (file.kind == ProblemKind::Msk) problem = residual_problem(file.snapshot, bias_force(file.snapshot));

  EvaluateOptions options;
  options.limits.max_lp = args.max_lp;
  options.limits.max_iterations = args.max_iterations;
  options.threads = args.threads > 0 ? args.threads : default_threads();
  options.seed = seed_given ? args.seed : file.seed.value_or(args.seed);

  PolytopeResult result;
  int code = kExitOk;
  std::string failure;
  try {
    result = evaluate(problem, eps, options);
  } catch (const IterationLimitError& e) {
    result = e.partial();
    code = kExitLimit;
    failure = e.what();
  }
  if (result.status == PolytopeStatus::Empty) {
    code = kExitEmpty;
    failure = "polytope is empty";
  } else if (result.status == PolytopeStatus::Degenerate) {
    code = kExitDegenerate;
    failure = "polytope is flat (lower-dimensional)";
  }

  write_text_or_file(args.output, args.format == "text" ? text_summary(result)
                                                        : format_result(result, options.seed));
  if (!args.mesh.empty() && !result.vertices.empty() && result.vertices.front().size() == 3) {
    std::ofstream mesh(args.mesh);
    if (!mesh) throw Error(ErrorKind::InvalidArgument, "cannot write " + args.mesh);
    write_off(mesh, result);
  }
  if (code != kExitOk) {
    const char* kind = code == kExitLimit       ? "IterationLimit"
                       : code == kExitEmpty     ? "EmptyPolytope"
                                                : "DegeneratePolytope";
    return report_error(kind, failure, code);
  }
  return kExitOk;
}

struct BenchArgs {
  int n = 7;
  std::string d_list = "20,40,60";
  int seeds = 10;
  std::uint64_t seed = 1;
  std::string algorithms = "ichm";
  std::string eps = "0.1,1,10";
  std::string delta = "36,18,12";
  int hpsm_max_d = 30;
  std::string csv;
  unsigned threads = 0;
};

int cmd_bench(const BenchArgs& args) {
  BenchmarkConfig config;
  config.n = args.n;
  config.d_list.clear();
  for (double d : parse_list(args.d_list)) config.d_list.push_back(static_cast<Eigen::Index>(d));
  config.seeds.clear();
  for (int i = 0; i < args.seeds; ++i) config.seeds.push_back(args.seed + static_cast<std::uint64_t>(i));
  config.algorithms.clear();
  std::stringstream ss(args.algorithms);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) config.algorithms.push_back(parse_algorithm(name));
  }
  config.eps_list = parse_list(args.eps);
  config.delta_list = parse_list(args.delta);
  config.hpsm_max_d = args.hpsm_max_d;
  config.threads = args.threads > 0 ? args.threads : default_threads();

  const auto records = run_benchmark(config);
  std::ostringstream out;
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
  write_text_or_file(args.csv, out.str());
  return kExitOk;
}

struct CapacityArgs {
  std::string snapshot;
  std::string watch;
  std::string direction = "0,0,1";
  double ratio = -1.0;
  double load = -1.0;
  double load_kg = -1.0;
  int interval_ms = 100;
  int max_updates = 0;
};

nlohmann::json capacity_report(const MuscleSnapshot& snapshot, const Vector& direction,
                               const CapacityArgs& args) {
  const BiasForceResult bias = bias_force(snapshot);
  const double residual = capacity_along(residual_problem(snapshot, bias), direction);
  const double raw = capacity_along(raw_problem(snapshot), direction);
  nlohmann::json j{{"bias_objective", bias.objective},
                   {"bias_kkt_residual", bias.kkt_residual},
                   {"bias_force_max", bias.f_bias.size() ? bias.f_bias.maxCoeff() : 0.0},
                   {"capacity_N", residual},
                   {"capacity_kg", residual / kGravity},
                   {"raw_capacity_N", raw},
                   {"raw_capacity_kg", raw / kGravity}};
  double load = args.load;
  if (args.load_kg >= 0.0) load = args.load_kg * kGravity;
  if (args.ratio >= 0.0 && load >= 0.0) {
    const AssistShare share = assist_share(std::max(residual, 0.0), args.ratio, load);
    j["load_N"] = load;
    j["human_N"] = share.human;
    j["robot_N"] = share.robot;
    j["human_kg"] = share.human / kGravity;
    j["robot_kg"] = share.robot / kGravity;
  }
  return j;
}

MuscleSnapshot load_snapshot(const std::string& path) {
  const ProblemFile file = read_problem(path);
  if (file.kind != ProblemKind::Msk) throw Error(ErrorKind::Parse, path + " is not an msk snapshot");
  return file.snapshot;
}

int cmd_capacity(const CapacityArgs& args) {
  std::vector<double> dir = parse_list(args.direction);
  Vector direction = Eigen::Map<Vector>(dir.data(), static_cast<Eigen::Index>(dir.size()));
  if (direction.size() == 0 || !(direction.norm() > 0.0)) {
    throw Error(ErrorKind::Parse, "direction must be a non-zero vector");
  }
  direction.normalize();

  if (args.watch.empty()) {
    const MuscleSnapshot s = load_snapshot(args.snapshot);
    if (direction.size() != s.outputs()) {
      throw Error(ErrorKind::Parse, "direction length does not match the snapshot output size");
    }
    std::cout << capacity_report(s, direction, args).dump(2) << '\n';
    return kExitOk;
  }

  // Streaming: one JSON line per new or modified snapshot file.
  std::map<std::string, fs::file_time_type> seen;
  int updates = 0;
  while (args.max_updates <= 0 || updates < args.max_updates) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.watch)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      std::error_code ec;
      const auto stamp = fs::last_write_time(path, ec);
      if (ec) continue;
      auto it = seen.find(path.string());
      if (it != seen.end() && it->second == stamp) continue;
      seen[path.string()] = stamp;
      nlohmann::json line;
      try {
        const MuscleSnapshot s = load_snapshot(path.string());
        line = capacity_report(s, direction, args);
      } catch (const Error& e) {
        line = {{"error", to_string(e.kind())}, {"message", e.what()}};
      }
      line["file"] = path.filename().string();
      std::cout << line.dump() << std::endl;
      if (args.max_updates > 0 && ++updates >= args.max_updates) return kExitOk;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(args.interval_ms));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasible output polytopes of A x = B y with box-bounded y"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Evaluate the polytope of a problem file");
  solve->add_option("input", solve_args.input, "Problem JSON file")->required();
  solve->add_option("--eps", solve_args.eps, "Accuracy in output units");
  solve->add_option("-o,--output", solve_args.output, "Result JSON path (default stdout)");
  solve->add_option("--mesh", solve_args.mesh, "Write the hull as an OFF mesh (m=3)");
  auto* seed_opt = solve->add_option("--seed", solve_args.seed, "Seed for degenerate restarts");
  solve->add_option("--max-lp", solve_args.max_lp, "LP budget");
  solve->add_option("--max-iterations", solve_args.max_iterations, "Pass budget");
  solve->add_option("--threads", solve_args.threads, "Worker threads (POLYFEAS_THREADS)");
  solve->add_option("--format", solve_args.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Time and accuracy study on mock models (CSV)");
  bench->add_option("--n", bench_args.n, "Joints");
  bench->add_option("--d", bench_args.d_list, "Comma-separated muscle counts");
  bench->add_option("--seeds", bench_args.seeds, "Runs per configuration");
  bench->add_option("--seed", bench_args.seed, "First seed");
  bench->add_option("--algorithms", bench_args.algorithms, "ichm,rsm,hpsm_exact");
  bench->add_option("--eps", bench_args.eps, "Comma-separated accuracies for ichm");
  bench->add_option("--delta", bench_args.delta, "Comma-separated grid steps (deg) for rsm");
  bench->add_option("--hpsm-max-d", bench_args.hpsm_max_d, "Skip hpsm above this d");
  bench->add_option("--csv", bench_args.csv, "Output CSV path (default stdout)");
  bench->add_option("--threads", bench_args.threads, "Worker threads (POLYFEAS_THREADS)");

  CapacityArgs cap_args;
  auto* capacity = app.add_subcommand("capacity", "Directional capacity of a muscle snapshot");
  auto* snap_opt = capacity->add_option("snapshot", cap_args.snapshot, "Snapshot JSON (kind msk)");
  auto* watch_opt =
      capacity->add_option("--watch", cap_args.watch, "Directory of snapshots to stream");
  snap_opt->excludes(watch_opt);
  capacity->add_option("--direction", cap_args.direction, "Comma-separated direction");
  capacity->add_option("--ratio", cap_args.ratio, "Human share of capacity in [0,1]");
  capacity->add_option("--load", cap_args.load, "Total load in N");
  capacity->add_option("--load-kg", cap_args.load_kg, "Total load in kg");
  capacity->add_option("--interval-ms", cap_args.interval_ms, "Polling period for --watch");
  capacity->add_option("--max-updates", cap_args.max_updates, "Stop after this many lines");

  bool inject_fault = false;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the oracle suites");
  selfcheck->add_flag("--inject-fault", inject_fault, "Break the support check on purpose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*solve) return cmd_solve(solve_args, seed_opt->count() > 0);
    if (*bench) return cmd_bench(bench_args);
    if (*capacity) {
      if (cap_args.snapshot.empty() && cap_args.watch.empty()) {
        return report_error("Parse", "capacity needs a snapshot file or --watch", kExitParse);
      }
      return cmd_capacity(cap_args);
    }
    if (*selfcheck) {
      const auto checks = run_selfcheck({inject_fault});
      print_checks(std::cout, checks);
      const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), kExitFailure);
  }
  return kExitFailure;
}
