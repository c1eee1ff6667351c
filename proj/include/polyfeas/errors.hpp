#pragma once

#include <stdexcept>
#include <string>

namespace polyfeas {

enum class ErrorKind {
  NonFinite,
  RankDeficient,
  DimensionMismatch,
  InvalidArgument,
  Infeasible,
  CycleLimit,
  Internal,
  DegenerateInput,
  IterationLimit,
  ComplexityGuard,
  UnboundedRegion,
  InfeasibleTorque,
  Parse,
  EmptyPolytope,
  DegeneratePolytope,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated so the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::CycleLimit: return "CycleLimit";
    case ErrorKind::Internal: return "Internal";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::ComplexityGuard: return "ComplexityGuard";
    case ErrorKind::UnboundedRegion: return "UnboundedRegion";
    case ErrorKind::InfeasibleTorque: return "InfeasibleTorque";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::EmptyPolytope: return "EmptyPolytope";
    case ErrorKind::DegeneratePolytope: return "DegeneratePolytope";
  }
  return "Unknown";
}

}  // namespace polyfeas
