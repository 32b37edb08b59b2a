#pragma once

#include "memwalk/models/report.hpp"

#include <vector>

namespace memwalk::models {

enum class KernelKind { exponential, tabulated };

/// Memory kernel K(t) with its decay constant delta (K' <= -delta K).
struct KernelSpec {
  KernelKind kind = KernelKind::exponential;
  double k0 = 1.0;
  double delta = 1.0;

  // Tabulated kind: monotone cubic Hermite interpolant through (nodes, values).
  std::vector<double> nodes;
  std::vector<double> values;
  std::vector<double> slopes;

  static KernelSpec exponential(double k0, double delta);
  /// Throws ArgumentError on malformed tables (fewer than two nodes, non-increasing
  /// nodes, negative values).
  static KernelSpec tabulated(std::vector<double> nodes, std::vector<double> values, double delta);
};

/// K(t). Negative t throws DomainError; for tabulated kernels t beyond the last node too.
double eval_kernel(const KernelSpec& spec, double t);

/// Checks K'(t) <= -delta_candidate K(t) at each grid point, with K' by finite differences.
/// Violations beyond 1e-8 are listed; empty or unsorted grids throw ArgumentError.
ValidationReport validate_kernel(const KernelSpec& spec, const std::vector<double>& grid,
                                 double delta_candidate);

}  // namespace memwalk::models
