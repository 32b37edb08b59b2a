#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace memwalk::models {

enum class Verdict { pass, warning, fail };

std::string_view to_string(Verdict v);

/// Outcome of one sampled condition.
struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::string message;
  /// Sample locations (times or radii) where the condition was violated.
  std::vector<double> violations;
  /// Estimated constant, or the statistic the verdict was based on.
  double estimate = std::numeric_limits<double>::quiet_NaN();
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  /// True when no check failed (warnings do not count).
  bool passed() const;
  const CheckResult* find(std::string_view name) const;
  void merge(const ValidationReport& other);
};

}  // namespace memwalk::models
