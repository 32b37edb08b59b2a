#pragma once

#include <vector>

namespace memwalk {

/// n-point Gauss-Legendre rule on [0, 1]. Nodes are ascending and exactly mirrored:
/// lower[i] = (1 - xi_i)/2 and upper[i] = (1 + xi_i)/2 are stored so that node n-1-i
/// has its two barycentric coordinates swapped bit for bit.
struct GaussLegendre {
  std::vector<double> nodes;    // s_i
  std::vector<double> weights;  // sum to 1
  std::vector<double> lower;    // 1 - s_i, exact mirror of nodes
};

GaussLegendre gauss_legendre(int n);

}  // namespace memwalk
