#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace rcfield {

/// One numeric comparison: a discrepancy and the tolerance it must stay under.
struct Check {
  std::string name;
  double discrepancy = 0.0;
  double tolerance = 0.0;

  bool passed() const { return discrepancy <= tolerance; }
};

struct Report {
  std::vector<Check> checks;

  void add(std::string name, double discrepancy, double tolerance) {
    checks.push_back(Check{std::move(name), discrepancy, tolerance});
  }
  void append(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
  }
  double max_discrepancy() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.discrepancy);
    return m;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace rcfield
