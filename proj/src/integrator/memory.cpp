#include "memwalk/integrator/memory.hpp"

#include "memwalk/models/bessel.hpp"

namespace memwalk::integrator {

MemoryQuadrature::MemoryQuadrature(const models::KernelSpec& kernel, double dt, int n_mem)
    : dt_(dt), n_mem_(n_mem), weights_(state::trapezoid_weights(kernel, dt, n_mem + 1)) {}

bool MemoryQuadrature::matches(const state::HistoryBuffer& buffer) const {
  return buffer.dt() == dt_ && buffer.n_mem() == n_mem_;
}

MemoryForce memory_force(const Vec& x_now, const state::HistoryBuffer& buffer,
                         const models::ModelSpec& model) {
  return memory_force(x_now, buffer, model, MemoryQuadrature(model.kernel, buffer.dt(), buffer.n_mem()));
}

MemoryForce memory_force(const Vec& x_now, const state::HistoryBuffer& buffer,
                         const models::ModelSpec& model, const MemoryQuadrature& quad) {
  if (!quad.matches(buffer)) {
    throw ArgumentError("quadrature weights do not match the history buffer");
  }
  if (x_now.size() != buffer.dim()) {
    throw ArgumentError("position and history dimensions differ");
  }
  const int d = buffer.dim();
  MemoryForce out;
  out.value = Vec::Zero(d);
  if (model.pilot.kind == models::PilotKind::zero) {
    return out;
  }

  const int n = buffer.size();
  const auto& w = quad.weights();
  if (model.pilot.kind == models::PilotKind::bessel_j1) {
    // sum_k w_k (J1(r)/r) (x - eta_k), r = |x - eta_k|
    double acc[kMaxDim] = {};
    double diff[kMaxDim];
    for (int k = 0; k < n; ++k) {
      double wk = w[static_cast<std::size_t>(k)];
      if (n == 1) {
        wk = 0.0;
      } else if (k == n - 1 && n < buffer.capacity()) {
        wk *= 0.5;
      }
      const double* eta = buffer.sample_data(k);
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        diff[i] = x_now[i] - eta[i];
        r2 += diff[i] * diff[i];
      }
      if (r2 == 0.0) {
        continue;  // H(0) = 0
      }
      const double f = wk * models::bessel_j1_over_r_sq(r2);
      for (int i = 0; i < d; ++i) {
        acc[i] += f * diff[i];
      }
    }
    for (int i = 0; i < d; ++i) {
      out.value[i] = acc[i];
    }
    if (buffer.has_tail() && model.kernel.kind == models::KernelKind::exponential) {
      out.value += state::tail_integral(model.kernel, buffer.stored_span()) *
                   models::pilot_force(model.pilot, x_now - buffer.tail());
    }
  } else {
    out.value = memory_integral(buffer, model.kernel, quad,
                                [&](const Vec& eta) { return models::pilot_force(model.pilot, x_now - eta); });
  }

  if (buffer.lossy()) {
    out.truncation_bound = buffer.truncation_bound(model.kernel, model.pilot, x_now);
    out.warning = out.truncation_bound > 1e-9;
  } else if (buffer.has_tail() && model.kernel.kind != models::KernelKind::exponential) {
    out.warning = true;
  }
  return out;
}

}  // namespace memwalk::integrator
