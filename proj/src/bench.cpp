#include "polyfeas/bench.hpp"

#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>

#include "polyfeas/baselines.hpp"
#include "polyfeas/errors.hpp"
#include "polyfeas/io.hpp"
#include "polyfeas/msk.hpp"

namespace polyfeas {

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Ichm: return "ichm";
    case Algorithm::Rsm: return "rsm";
    case Algorithm::HpsmExact: return "hpsm_exact";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "ichm") return Algorithm::Ichm;
  if (name == "rsm") return Algorithm::Rsm;
  if (name == "hpsm_exact" || name == "hpsm") return Algorithm::HpsmExact;
  throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + name + "'");
}

FeasibilityProblem benchmark_problem(std::uint64_t seed, Eigen::Index n, Eigen::Index d,
                                     Eigen::Index m) {
  const MuscleSnapshot s = mock_model(seed, n, d, m);
  return residual_problem(s, bias_force(s));
}

namespace {

struct Job {
  Algorithm algorithm;
  Eigen::Index d;
  double parameter;
  std::uint64_t seed;
};

BenchmarkRecord run_job(const Job& job, const BenchmarkConfig& config) {
  BenchmarkRecord rec;
  rec.algorithm = job.algorithm;
  rec.d = job.d;
  rec.parameter = job.parameter;
  rec.seed = job.seed;
  rec.status = "ok";
  if (job.algorithm == Algorithm::HpsmExact && job.d > config.hpsm_max_d) {
    rec.status = "skipped";
    return rec;
  }
  const FeasibilityProblem problem = benchmark_problem(job.seed, config.n, job.d, config.m);
  const auto directions = sample_directions(config.probe_directions, config.m, config.probe_seed);

  std::vector<Vector> vertices;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (job.algorithm) {
      case Algorithm::Ichm: {
        EvaluateOptions options;
        options.seed = job.seed;
        vertices = evaluate(problem, job.parameter, options).vertices;
        break;
      }
      case Algorithm::Rsm:
        vertices = rsm_approximate(problem, ray_grid(job.parameter));
        break;
      case Algorithm::HpsmExact:
        vertices = hpsm_exact(problem);
        break;
    }
  } catch (const Error& e) {
    rec.status = e.kind() == ErrorKind::ComplexityGuard ? "skipped" : to_string(e.kind());
    return rec;
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rec.vertex_count = vertices.size();
  rec.max_underestimation =
      max_underestimation(support_oracle(problem, directions), directions, vertices);
  return rec;
}

}  // namespace

std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig& config) {
  std::vector<Job> jobs;
  for (Eigen::Index d : config.d_list) {
    for (std::uint64_t seed : config.seeds) {
      for (Algorithm a : config.algorithms) {
        switch (a) {
          case Algorithm::Ichm:
            for (double eps : config.eps_list) jobs.push_back({a, d, eps, seed});
            break;
          case Algorithm::Rsm:
            for (double delta : config.delta_list) jobs.push_back({a, d, delta, seed});
            break;
          case Algorithm::HpsmExact:
            jobs.push_back({a, d, 0.0, seed});
            break;
        }
      }
    }
  }

  std::vector<BenchmarkRecord> records(jobs.size());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, config.threads), jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) records[i] = run_job(jobs[i], config);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

void write_csv_header(std::ostream& out) {
  out << "algorithm,d,parameter,wall_time_ms,vertex_count,max_underestimation,seed,status\n";
}

void write_csv_row(std::ostream& out, const BenchmarkRecord& r) {
  out << to_string(r.algorithm) << ',' << r.d << ',' << format_double(r.parameter) << ','
      << format_double(r.wall_time_ms) << ',' << r.vertex_count << ','
      << format_double(r.max_underestimation) << ',' << r.seed << ',' << r.status << '\n';
}

}  // namespace polyfeas
