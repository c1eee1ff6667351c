#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polyfeas/ichm.hpp"

namespace polyfeas {

enum class Algorithm { Ichm, Rsm, HpsmExact };

const char* to_string(Algorithm algorithm);
/// Accepts "ichm", "rsm", "hpsm_exact" (or "hpsm"). Throws InvalidArgument.
Algorithm parse_algorithm(const std::string& name);

struct BenchmarkRecord {
  Algorithm algorithm = Algorithm::Ichm;
  Eigen::Index d = 0;
  double parameter = 0.0;  // eps for ichm, grid step in degrees for rsm, 0 for hpsm
  double wall_time_ms = 0.0;
  std::size_t vertex_count = 0;
  double max_underestimation = 0.0;
  std::uint64_t seed = 0;
  std::string status;  // "ok", "skipped" or an error kind
};

struct BenchmarkConfig {
  Eigen::Index n = 7;
  Eigen::Index m = 3;
  std::vector<Eigen::Index> d_list{20, 40, 60};
  std::vector<std::uint64_t> seeds{1};
  std::vector<Algorithm> algorithms{Algorithm::Ichm};
  std::vector<double> eps_list{0.1, 1.0, 10.0};
  std::vector<double> delta_list{36.0, 18.0, 12.0};
  /// HPSM is skipped above this muscle count or when its guard trips.
  Eigen::Index hpsm_max_d = 30;
  std::size_t probe_directions = 200;
  std::uint64_t probe_seed = 0x5eed;
  unsigned threads = 1;
};

/// Benchmark problem for a seed: the residual polytope of a zero-bias mock
/// model with n joints, d muscles and m outputs.
FeasibilityProblem benchmark_problem(std::uint64_t seed, Eigen::Index n, Eigen::Index d,
                                     Eigen::Index m);

/// One record per (algorithm, d, parameter, seed), ordered by d, seed,
/// algorithm, parameter regardless of the thread count.
std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig& config);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchmarkRecord& record);

}  // namespace polyfeas
