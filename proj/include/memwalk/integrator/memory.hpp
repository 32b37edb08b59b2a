#pragma once

#include "memwalk/models/model.hpp"
#include "memwalk/state/history.hpp"

#include <vector>

namespace memwalk::integrator {

/// Cached trapezoid weights w_k K(k dt) for a fixed (kernel, dt, n_mem).
class MemoryQuadrature {
 public:
  MemoryQuadrature() = default;
  MemoryQuadrature(const models::KernelSpec& kernel, double dt, int n_mem);

  const std::vector<double>& weights() const { return weights_; }
  double dt() const { return dt_; }
  int n_mem() const { return n_mem_; }
  bool matches(const state::HistoryBuffer& buffer) const;

 private:
  double dt_ = 0.0;
  int n_mem_ = 0;
  std::vector<double> weights_;
};

struct MemoryForce {
  Vec value;
  /// Set when the buffer has been truncated lossily beyond tolerance.
  bool warning = false;
  double truncation_bound = 0.0;
};

/// Trapezoid over the stored lags of H(x_now - eta(s)) K(s), plus H(x_now - tail) times the
/// analytic tail mass when the buffer carries a tail.
MemoryForce memory_force(const Vec& x_now, const state::HistoryBuffer& buffer,
                         const models::ModelSpec& model);
MemoryForce memory_force(const Vec& x_now, const state::HistoryBuffer& buffer,
                         const models::ModelSpec& model, const MemoryQuadrature& quad);

/// Same trapezoid+tail rule for a general integrand: sum_k w_k f(eta_k) (+ tail term).
/// f receives eta(s) and returns a d-vector.
template <class F>
Vec memory_integral(const state::HistoryBuffer& buffer, const models::KernelSpec& kernel,
                    const MemoryQuadrature& quad, F&& f);

}  // namespace memwalk::integrator

#include "memwalk/integrator/memory_impl.hpp"
