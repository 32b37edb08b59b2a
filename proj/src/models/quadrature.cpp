#include "memwalk/quadrature.hpp"

#include "memwalk/core.hpp"

#include <cmath>
#include <numbers>

namespace memwalk {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) {
    throw ArgumentError("gauss_legendre: need at least one node");
  }
  GaussLegendre rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  rule.lower.assign(n, 0.0);
  // roots of P_n on [-1, 1] by Newton from the Chebyshev-like guess, one per mirrored pair
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) halved for [0, 1]
    const int hi = n - 1 - i;
    // x > 0 here: node hi = (1 + x)/2, node i = (1 - x)/2
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.lower[hi] = 0.5 * (1.0 - x);
    rule.nodes[i] = rule.lower[hi];
    rule.lower[i] = rule.nodes[hi];
    rule.weights[i] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

}  // namespace memwalk
