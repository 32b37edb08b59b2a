#pragma once

#include "memwalk/models/model.hpp"
#include "memwalk/models/report.hpp"

#include <cstdint>

namespace memwalk::models {

/// Log-spaced radii in [r_min, r_max], `directions` random unit vectors per radius.
struct SamplingPlan {
  double r_min = 1e-4;
  double r_max = 1e2;
  int radii = 121;
  int directions = 64;
  std::uint64_t seed = 0;
  /// Memory exponent checked against the admissible window.
  double p2 = 1.5;
};

/// Open interval of admissible memory exponents p2 for given p1 and eps1.
struct P2Window {
  double lower;
  double upper;
  bool contains(double p2) const { return p2 > lower && p2 < upper; }
};
P2Window p2_window(double p1, double eps1);

/// Constants above this are reported as unbounded.
inline constexpr double kUnboundedConstant = 1e12;

/// Sampled verdicts for the kernel, pilot force, smooth and singular potentials.
/// Check names:
///   kernel.decay, pilot.growth, smooth.growth, smooth.coercivity, smooth.lower_bound,
///   smooth.q0, singular.blowup, singular.bounds, singular.gradient_structure,
///   singular.steepness, memory.p2_window
ValidationReport validate_assumptions(const ModelSpec& model, const SamplingPlan& plan);

}  // namespace memwalk::models
