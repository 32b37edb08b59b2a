#include "memwalk/state/history.hpp"

#include <algorithm>
#include <cmath>

namespace memwalk::state {
namespace {

constexpr double kNormWarningTolerance = 1e-9;

}  // namespace

int default_memory_steps(const models::KernelSpec& kernel, double dt) {
  if (!(dt > 0.0)) {
    throw ArgumentError("dt must be positive");
  }
  const double horizon = -std::log(kHorizonTolerance) / kernel.delta;
  return static_cast<int>(std::ceil(horizon / dt - 1e-9));
}

HistoryBuffer::HistoryBuffer(int dim, double dt, int n_mem)
    : dim_(dim), dt_(dt), n_mem_(n_mem), tail_(Vec::Zero(dim)) {
  if (dim < 1 || dim > kMaxDim) {
    throw ArgumentError("history dimension out of range");
  }
  if (!(dt > 0.0) || n_mem < 0) {
    throw ArgumentError("history needs dt > 0 and n_mem >= 0");
  }
  data_.assign(static_cast<std::size_t>(n_mem + 1) * dim, 0.0);
}

HistoryBuffer HistoryBuffer::constant_past(const Vec& past, double dt, int n_mem) {
  HistoryBuffer b(static_cast<int>(past.size()), dt, n_mem);
  for (int k = 0; k <= n_mem; ++k) {
    std::copy(past.data(), past.data() + b.dim_, b.data_.data() + static_cast<std::size_t>(k) * b.dim_);
  }
  b.size_ = n_mem + 1;
  b.head_ = n_mem;
  b.set_tail(past);
  return b;
}

HistoryBuffer HistoryBuffer::from_samples(const std::vector<Vec>& samples, double dt, int n_mem,
                                          std::optional<Vec> tail) {
  if (samples.empty() && !tail) {
    throw ArgumentError("cannot infer the history dimension from an empty sample list");
  }
  const int dim = samples.empty() ? static_cast<int>(tail->size()) : static_cast<int>(samples[0].size());
  if (static_cast<int>(samples.size()) > n_mem + 1) {
    throw ArgumentError("more samples than the history capacity");
  }
  HistoryBuffer b(dim, dt, n_mem);
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    if (it->size() != dim) {
      throw ArgumentError("history samples have inconsistent dimensions");
    }
    b.push(*it);
  }
  if (tail) {
    b.set_tail(*tail);
  }
  return b;
}

void HistoryBuffer::set_tail(const Vec& c) {
  if (c.size() != dim_) {
    throw ArgumentError("tail dimension mismatch");
  }
  tail_ = c;
  has_tail_ = true;
}

void HistoryBuffer::set_loss_state(bool lossy, double max_evicted_norm) {
  lossy_ = lossy;
  max_evicted_norm_ = max_evicted_norm;
  if (lossy_) {
    has_tail_ = false;
  }
}

void HistoryBuffer::push(const Vec& x_new) {
  if (x_new.size() != dim_) {
    throw ArgumentError("pushed sample has the wrong dimension");
  }
  const int cap = capacity();
  head_ = (head_ + 1) % cap;
  double* slot = data_.data() + static_cast<std::size_t>(head_) * dim_;
  if (size_ == cap) {
    // slot holds the oldest sample, which is being evicted
    bool equals_tail = has_tail_;
    double norm2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      norm2 += slot[i] * slot[i];
      if (equals_tail && slot[i] != tail_[i]) {
        equals_tail = false;
      }
    }
    if (!equals_tail) {
      lossy_ = true;
      has_tail_ = false;
      max_evicted_norm_ = std::max(max_evicted_norm_, std::sqrt(norm2));
    }
  } else {
    ++size_;
  }
  std::copy(x_new.data(), x_new.data() + dim_, slot);
}

Vec HistoryBuffer::sample(int k) const {
  if (k < 0 || k >= size_) {
    throw ArgumentError("history sample index out of range");
  }
  return Eigen::Map<const Eigen::VectorXd>(sample_data(k), dim_);
}

std::vector<Vec> HistoryBuffer::samples() const {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int k = 0; k < size_; ++k) {
    out.push_back(sample(k));
  }
  return out;
}

double HistoryBuffer::truncation_bound(const models::KernelSpec& kernel,
                                       const models::PilotForceSpec& pilot, const Vec& x_now) const {
  if (!lossy_) {
    return 0.0;
  }
  const double reach = x_now.norm() + max_evicted_norm_;
  return pilot.a_h * (std::pow(reach, pilot.p1) + 1.0) * models::eval_kernel(kernel, stored_span()) /
         kernel.delta;
}

bool HistoryBuffer::operator==(const HistoryBuffer& other) const {
  if (dim_ != other.dim_ || dt_ != other.dt_ || n_mem_ != other.n_mem_ || size_ != other.size_ ||
      has_tail_ != other.has_tail_ || lossy_ != other.lossy_ ||
      max_evicted_norm_ != other.max_evicted_norm_) {
    return false;
  }
  if (has_tail_ && tail_ != other.tail_) {
    return false;
  }
  for (int k = 0; k < size_; ++k) {
    if (!std::equal(sample_data(k), sample_data(k) + dim_, other.sample_data(k))) {
      return false;
    }
  }
  return true;
}

HistoryBuffer push_sample(HistoryBuffer buffer, const Vec& x_new) {
  buffer.push(x_new);
  return buffer;
}

double tail_integral(const models::KernelSpec& kernel, double T, int moment) {
  if (kernel.kind != models::KernelKind::exponential) {
    throw UnsupportedError("analytic tail requires an exponential kernel");
  }
  if (moment != 0) {
    throw UnsupportedError("only the zeroth tail moment is supported");
  }
  if (!(T >= 0.0)) {
    throw DomainError("tail integral needs T >= 0");
  }
  return kernel.k0 * std::exp(-kernel.delta * T) / kernel.delta;
}

std::vector<double> trapezoid_weights(const models::KernelSpec& kernel, double dt, int n_nodes) {
  std::vector<double> w(static_cast<std::size_t>(std::max(n_nodes, 0)), 0.0);
  if (n_nodes <= 1) {
    return w;
  }
  for (int k = 0; k < n_nodes; ++k) {
    const double end = (k == 0 || k == n_nodes - 1) ? 0.5 : 1.0;
    w[static_cast<std::size_t>(k)] = end * dt * models::eval_kernel(kernel, k * dt);
  }
  return w;
}

WeightedNorm weighted_norm(const HistoryBuffer& buffer, const models::KernelSpec& kernel, double q) {
  return weighted_norm(buffer, kernel, q, trapezoid_weights(kernel, buffer.dt(), buffer.capacity()));
}

WeightedNorm weighted_norm(const HistoryBuffer& buffer, const models::KernelSpec& kernel, double q,
                           const std::vector<double>& weights) {
  if (!(q > 1.0)) {
    throw DomainError("weighted norm needs q > 1");
  }
  if (static_cast<int>(weights.size()) < buffer.capacity()) {
    throw ArgumentError("quadrature weights shorter than the history capacity");
  }
  WeightedNorm out;
  out.q = q;
  const int n = buffer.size();
  const int dim = buffer.dim();
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double* p = buffer.sample_data(k);
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      r2 += p[i] * p[i];
    }
    if (r2 == 0.0) {
      continue;
    }
    double w = weights[static_cast<std::size_t>(k)];
    if (n == 1) {
      w = 0.0;
    } else if (k == n - 1 && n < buffer.capacity()) {
      w *= 0.5;  // partially filled buffer: this node closes the trapezoid
    }
    sum += w * std::pow(r2, 0.5 * q);
  }

  if (buffer.has_tail()) {
    const double c = buffer.tail().norm();
    if (kernel.kind == models::KernelKind::exponential) {
      if (c > 0.0) {
        sum += std::pow(c, q) * tail_integral(kernel, buffer.stored_span());
      }
    } else {
      out.warning = true;  // no analytic tail for this kernel
    }
  } else if (buffer.lossy()) {
    const double k_end = models::eval_kernel(kernel, buffer.stored_span());
    out.truncation_bound = std::pow(buffer.max_evicted_norm(), q) * k_end / kernel.delta;
    out.warning = out.truncation_bound > kNormWarningTolerance * (1.0 + sum);
  }
  out.integral = sum;
  out.value = std::pow(sum, 1.0 / q);
  return out;
}

}  // namespace memwalk::state
