#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace memwalk {

/// Largest spatial dimension supported by the inline vector storage.
inline constexpr int kMaxDim = 8;

/// Position / velocity / force vector in R^d. Dynamic size, inline storage.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// d x d matrix (Hessians, Jacobians).
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline Vec zero_vec(int dim) { return Vec::Zero(dim); }

inline Vec unit_vec(int dim, int axis) {
  Vec e = Vec::Zero(dim);
  e[axis] = 1.0;
  return e;
}

/// Argument outside the mathematical domain of an operation (negative time, q <= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Position at (or numerically indistinguishable from) the singularity of G.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested capability is not available for this object kind.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input to an operation (empty grids, mismatched buffers, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace memwalk
