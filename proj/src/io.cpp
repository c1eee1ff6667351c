#include "polyfeas/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "polyfeas/errors.hpp"

namespace polyfeas {

using nlohmann::json;

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) parse_fail(std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) parse_fail(where + ": non-finite number");
  return x;
}

Vector read_vector(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array()) parse_fail(std::string(key) + ": expected an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number(v[i], std::string(key) + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix read_matrix(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_array() || v.empty()) parse_fail(std::string(key) + ": expected a non-empty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array()) parse_fail(std::string(key) + ": rows must be arrays");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      parse_fail(std::string(key) + ": ragged row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          number(v[i][j], std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return out;
}

void put_vector(std::ostream& out, const Vector& v) {
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << format_double(v(i));
  out << ']';
}

void put_matrix(std::ostream& out, const Matrix& M, const char* indent) {
  out << '[';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    out << (i ? ",\n" : "\n") << indent << "  ";
    put_vector(out, M.row(i).transpose());
  }
  out << '\n' << indent << ']';
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("problem file must be a JSON object");

  ProblemFile file;
  if (auto it = doc.find("schema_version"); it != doc.end()) {
    if (!it->is_string()) parse_fail("schema_version must be a string");
    file.schema_version = it->get<std::string>();
    if (file.schema_version != kSchemaVersion) {
      parse_fail("unsupported schema_version '" + file.schema_version + "'");
    }
  }
  const std::string kind = doc.value("kind", std::string("generic"));
  try {
    if (kind == "generic") {
      file.kind = ProblemKind::Generic;
      file.problem.A = read_matrix(doc, "A");
      file.problem.B = read_matrix(doc, "B");
      file.problem.y_lo = read_vector(doc, "y_lo");
      file.problem.y_hi = read_vector(doc, "y_hi");
      validate(file.problem);
    } else if (kind == "msk") {
      file.kind = ProblemKind::Msk;
      file.snapshot.jacobian_T = read_matrix(doc, "jacobian_T");
      file.snapshot.moment_arm_T = read_matrix(doc, "moment_arm_T");
      file.snapshot.f_passive = read_vector(doc, "f_passive");
      file.snapshot.f_max = read_vector(doc, "f_max");
      file.snapshot.torque_bias = read_vector(doc, "torque_bias");
      validate(file.snapshot);
    } else {
      parse_fail("unknown kind '" + kind + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    parse_fail(std::string("inconsistent problem: ") + e.what());
  }
  if (auto it = doc.find("epsilon"); it != doc.end() && !it->is_null()) {
    file.epsilon = number(*it, "epsilon");
    if (*file.epsilon <= 0.0) parse_fail("epsilon must be positive");
  }
  if (auto it = doc.find("seed"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) parse_fail("seed must be a non-negative integer");
    file.seed = it->get<std::uint64_t>();
  }
  return file;
}

ProblemFile read_problem(const std::string& path) { return parse_problem(read_text(path)); }

std::string format_problem(const ProblemFile& file) {
  std::ostringstream out;
  out << "{\n  \"schema_version\": \"" << file.schema_version << "\",\n";
  if (file.kind == ProblemKind::Generic) {
    out << "  \"kind\": \"generic\",\n  \"A\": ";
    put_matrix(out, file.problem.A, "  ");
    out << ",\n  \"B\": ";
    put_matrix(out, file.problem.B, "  ");
    out << ",\n  \"y_lo\": ";
    put_vector(out, file.problem.y_lo);
    out << ",\n  \"y_hi\": ";
    put_vector(out, file.problem.y_hi);
  } else {
    out << "  \"kind\": \"msk\",\n  \"jacobian_T\": ";
    put_matrix(out, file.snapshot.jacobian_T, "  ");
    out << ",\n  \"moment_arm_T\": ";
    put_matrix(out, file.snapshot.moment_arm_T, "  ");
    out << ",\n  \"f_passive\": ";
    put_vector(out, file.snapshot.f_passive);
    out << ",\n  \"f_max\": ";
    put_vector(out, file.snapshot.f_max);
    out << ",\n  \"torque_bias\": ";
    put_vector(out, file.snapshot.torque_bias);
  }
  if (file.epsilon) out << ",\n  \"epsilon\": " << format_double(*file.epsilon);
  if (file.seed) out << ",\n  \"seed\": " << *file.seed;
  out << "\n}\n";
  return out.str();
}

void write_problem(const std::string& path, const ProblemFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << format_problem(file);
}

std::string format_result(const PolytopeResult& result, std::optional<std::uint64_t> seed) {
  std::ostringstream out;
  out << "{\n  \"status\": \"" << to_string(result.status) << "\",\n  \"vertices\": [";
  for (std::size_t i = 0; i < result.vertices.size(); ++i) {
    out << (i ? ",\n    " : "\n    ");
    put_vector(out, result.vertices[i]);
  }
  out << (result.vertices.empty() ? "]" : "\n  ]") << ",\n  \"hrep\": {\n    \"normals\": [";
  for (Eigen::Index i = 0; i < result.hrep_normals.rows(); ++i) {
    out << (i ? ",\n      " : "\n      ");
    put_vector(out, result.hrep_normals.row(i).transpose());
  }
  out << (result.hrep_normals.rows() == 0 ? "]" : "\n    ]") << ",\n    \"offsets\": ";
  put_vector(out, result.hrep_offsets);
  out << "\n  },\n  \"achieved_eps\": " << format_double(result.achieved_eps)
      << ",\n  \"lp_count\": " << result.lp_count << ",\n  \"iterations\": " << result.iterations;
  if (seed) out << ",\n  \"seed\": " << *seed;
  out << "\n}\n";
  return out.str();
}

void write_off(std::ostream& out, const PolytopeResult& result) {
  if (result.vertices.empty() || result.vertices.front().size() != 3) {
    throw Error(ErrorKind::InvalidArgument, "OFF export needs a 3-dimensional polytope");
  }
  out << "OFF\n" << result.vertices.size() << ' ' << result.triangles.size() << " 0\n";
  for (const auto& v : result.vertices) {
    out << format_double(v(0)) << ' ' << format_double(v(1)) << ' ' << format_double(v(2)) << '\n';
  }
  for (const auto& t : result.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace polyfeas
