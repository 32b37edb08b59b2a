#pragma once

#include "memwalk/core.hpp"
#include "memwalk/models/kernel.hpp"
#include "memwalk/models/potentials.hpp"

#include <optional>
#include <vector>

namespace memwalk::state {

struct WalkerState {
  Vec x;
  Vec v;
  double t = 0.0;
};

/// Relative kernel mass left beyond the default memory horizon.
inline constexpr double kHorizonTolerance = 1e-12;

/// Smallest n with K(n dt)/K(0) <= kHorizonTolerance for an exponential kernel:
/// ceil(-ln(1e-12) / (delta dt)).
int default_memory_steps(const models::KernelSpec& kernel, double dt);

/// Past positions eta(s) = x(t - s) at s = k dt, k = 0..n_mem (most recent first),
/// plus an optional constant value for s beyond the stored range.
class HistoryBuffer {
 public:
  HistoryBuffer() = default;
  /// Empty buffer without a tail.
  HistoryBuffer(int dim, double dt, int n_mem);

  /// Buffer completely filled with `past`, which is also the tail constant.
  static HistoryBuffer constant_past(const Vec& past, double dt, int n_mem);
  /// Rebuilds a buffer from samples in logical order (most recent first).
  static HistoryBuffer from_samples(const std::vector<Vec>& samples, double dt, int n_mem,
                                    std::optional<Vec> tail);

  /// Shift every sample one slot back and store x_new at s = 0. When the buffer is full
  /// the oldest sample is evicted: losslessly if it equals the tail constant, otherwise
  /// the tail is dropped and the eviction recorded for the truncation bound.
  void push(const Vec& x_new);

  int dim() const { return dim_; }
  double dt() const { return dt_; }
  int n_mem() const { return n_mem_; }
  int capacity() const { return n_mem_ + 1; }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool full() const { return size_ == n_mem_ + 1; }
  double horizon() const { return n_mem_ * dt_; }
  /// Lag covered by stored samples, (size - 1) dt.
  double stored_span() const { return size_ > 0 ? (size_ - 1) * dt_ : 0.0; }

  /// Pointer to the dim() coordinates of eta(k dt); 0 <= k < size().
  const double* sample_data(int k) const {
    int idx = head_ - k;
    if (idx < 0) {
      idx += capacity();
    }
    return data_.data() + static_cast<std::size_t>(idx) * dim_;
  }
  Vec sample(int k) const;
  std::vector<Vec> samples() const;

  bool has_tail() const { return has_tail_; }
  const Vec& tail() const { return tail_; }
  void set_tail(const Vec& c);

  /// True once a sample other than the tail constant has been evicted.
  bool lossy() const { return lossy_; }
  double max_evicted_norm() const { return max_evicted_norm_; }
  /// Restores the eviction record (checkpoint reload). A lossy buffer has no tail.
  void set_loss_state(bool lossy, double max_evicted_norm);

  /// Bound on the memory force lost to truncation:
  /// a_H ((|x_now| + max evicted |eta|)^p1 + 1) K(T_mem) / delta. Zero while lossless.
  double truncation_bound(const models::KernelSpec& kernel, const models::PilotForceSpec& pilot,
                          const Vec& x_now) const;

  /// Same samples, tail and loss state.
  bool operator==(const HistoryBuffer& other) const;

 private:
  int dim_ = 0;
  double dt_ = 0.0;
  int n_mem_ = 0;
  int size_ = 0;
  int head_ = -1;
  std::vector<double> data_;
  bool has_tail_ = false;
  Vec tail_;
  bool lossy_ = false;
  double max_evicted_norm_ = 0.0;
};

/// Value-semantics push.
HistoryBuffer push_sample(HistoryBuffer buffer, const Vec& x_new);

/// int_T^inf K(s) ds = K(0) e^{-delta T} / delta for exponential kernels (moment 0 only).
/// Other kernels or moments throw UnsupportedError; T < 0 throws DomainError.
double tail_integral(const models::KernelSpec& kernel, double T, int moment = 0);

/// Trapezoid weights w_k K(k dt), k = 0..n_nodes-1, on the uniform lag grid.
std::vector<double> trapezoid_weights(const models::KernelSpec& kernel, double dt, int n_nodes);

struct WeightedNorm {
  double q = 0.0;
  /// (int |eta|^q K)^(1/q)
  double value = 0.0;
  /// value^q
  double integral = 0.0;
  /// Set when part of the history is missing (lossy truncation, or no analytic tail).
  bool warning = false;
  double truncation_bound = 0.0;
};

/// Trapezoid over stored samples plus |tail|^q times the analytic tail mass.
/// Throws DomainError for q <= 1.
WeightedNorm weighted_norm(const HistoryBuffer& buffer, const models::KernelSpec& kernel, double q);

/// Same, with weights from trapezoid_weights(kernel, dt, capacity) supplied by the caller.
WeightedNorm weighted_norm(const HistoryBuffer& buffer, const models::KernelSpec& kernel, double q,
                           const std::vector<double>& weights);

}  // namespace memwalk::state
