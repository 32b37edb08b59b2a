#pragma once

namespace memwalk::integrator {

template <class F>
Vec memory_integral(const state::HistoryBuffer& buffer, const models::KernelSpec& kernel,
                    const MemoryQuadrature& quad, F&& f) {
  const int n = buffer.size();
  const int d = buffer.dim();
  const auto& w = quad.weights();
  Vec acc = Vec::Zero(d);
  for (int k = 0; k < n; ++k) {
    double wk = w[static_cast<std::size_t>(k)];
    if (n == 1) {
      wk = 0.0;
    } else if (k == n - 1 && n < buffer.capacity()) {
      wk *= 0.5;
    }
    if (wk == 0.0) {
      continue;
    }
    acc += wk * f(Vec(Eigen::Map<const Eigen::VectorXd>(buffer.sample_data(k), d)));
  }
  if (buffer.has_tail() && kernel.kind == models::KernelKind::exponential) {
    acc += state::tail_integral(kernel, buffer.stored_span()) * f(buffer.tail());
  }
  return acc;
}

}  // namespace memwalk::integrator
