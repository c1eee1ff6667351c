#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyfeas {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfcheckOptions {
  /// Drops half of the vertices returned by the iterative hull before the
  /// support-deficit check, which must then fail.
  bool inject_fault = false;
};

/// Oracle suites on fixed seeds: corner enumeration against the iterative
/// hull, zonotope corner containment, support deficits, capacity against the
/// support oracle and bias forces against active-set enumeration.
std::vector<CheckOutcome> run_selfcheck(const SelfcheckOptions& options = {});

void print_checks(std::ostream& out, const std::vector<CheckOutcome>& checks);

}  // namespace polyfeas
