#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "polyfeas/ichm.hpp"
#include "polyfeas/msk.hpp"

namespace polyfeas {

inline constexpr const char* kSchemaVersion = "1";

enum class ProblemKind { Generic, Msk };

/// JSON problem file. Matrices are nested row-major arrays.
///   generic: A, B, y_lo, y_hi
///   msk:     jacobian_T, moment_arm_T, f_passive, f_max, torque_bias
/// Optional keys: epsilon, seed.
struct ProblemFile {
  std::string schema_version = kSchemaVersion;
  ProblemKind kind = ProblemKind::Generic;
  FeasibilityProblem problem;  // kind == Generic
  MuscleSnapshot snapshot;     // kind == Msk
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
};

/// Throws Error(Parse) on malformed JSON, missing keys, non-finite numbers or
/// inconsistent dimensions.
ProblemFile parse_problem(const std::string& text);
ProblemFile read_problem(const std::string& path);

/// Numbers are written with 17 significant digits so reading them back
/// reproduces every double exactly.
std::string format_problem(const ProblemFile& file);
void write_problem(const std::string& path, const ProblemFile& file);

/// {vertices, hrep: {normals, offsets}, achieved_eps, lp_count, iterations, status}.
std::string format_result(const PolytopeResult& result, std::optional<std::uint64_t> seed = {});

/// OFF mesh of an m=3 result (outward counter-clockwise triangles).
/// Throws InvalidArgument for other dimensions.
void write_off(std::ostream& out, const PolytopeResult& result);

/// Exact decimal form of a double (17 significant digits).
std::string format_double(double value);

std::string read_text(const std::string& path);

}  // namespace polyfeas
