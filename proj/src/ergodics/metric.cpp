#include "memwalk/ergodics/metric.hpp"

#include "memwalk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace memwalk::ergodics {

double segment_distance_to_origin(const Vec& a, const Vec& b) {
  const Vec d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) {
    return a.norm();
  }
  const double s = std::clamp(-a.dot(d) / len2, 0.0, 1.0);
  return (a + s * d).norm();
}

namespace {

void require_compatible(const HistoryBuffer& a, const HistoryBuffer& b) {
  if (a.dim() != b.dim() || a.dt() != b.dt() || a.n_mem() != b.n_mem() || a.size() != b.size() ||
      a.has_tail() != b.has_tail()) {
    throw ArgumentError("history buffers differ in dt, horizon, fill or tail");
  }
}

}  // namespace

HistoryBuffer interpolate_history(const HistoryBuffer& a, const HistoryBuffer& b, double s, double one_minus_s) {
  require_compatible(a, b);
  std::vector<Vec> samples;
  samples.reserve(static_cast<std::size_t>(a.size()));
  const int d = a.dim();
  for (int k = 0; k < a.size(); ++k) {
    const double* pa = a.sample_data(k);
    const double* pb = b.sample_data(k);
    Vec x(d);
    for (int i = 0; i < d; ++i) {
      x[i] = s * pa[i] + one_minus_s * pb[i];
    }
    samples.push_back(x);
  }
  std::optional<Vec> tail;
  if (a.has_tail()) {
    tail = Vec(s * a.tail() + one_minus_s * b.tail());
  }
  return HistoryBuffer::from_samples(samples, a.dt(), a.n_mem(), tail);
}

double phase_distance(const PhasePoint& a, const PhasePoint& b, const models::ModelSpec& model, double p2) {
  const HistoryBuffer diff = interpolate_history(a.history, b.history, 1.0, -1.0);
  return (a.state.x - b.state.x).norm() + (a.state.v - b.state.v).norm() +
         state::weighted_norm(diff, model.kernel, p2).value;
}

double rho_line(const PhasePoint& a, const PhasePoint& b, const models::ModelSpec& model, const MetricParams& metric,
                int nodes) {
  const double length = phase_distance(a, b, model, metric.params.p2);
  if (length == 0.0) {
    return 0.0;
  }
  if (segment_distance_to_origin(a.state.x, b.state.x) < metric.x_min) {
    return std::numeric_limits<double>::infinity();
  }
  const GaussLegendre rule = gauss_legendre(nodes);
  const auto weights = state::trapezoid_weights(model.kernel, a.history.dt(), a.history.capacity());
  std::vector<double> half_psi(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const double s = rule.nodes[i];
    const double r = rule.lower[i];
    const WalkerState st{s * a.state.x + r * b.state.x, s * a.state.v + r * b.state.v, 0.0};
    const HistoryBuffer eta = interpolate_history(a.history, b.history, s, r);
    half_psi[i] = 0.5 * lyapunov::psi(st, eta, model, metric.params, weights);
  }
  const double m = *std::max_element(half_psi.begin(), half_psi.end());
  // mirrored pairs summed together, so swapping a and b gives the same bits
  double sum = 0.0;
  for (int i = 0; i < nodes / 2; ++i) {
    const int j = nodes - 1 - i;
    sum += rule.weights[i] * (std::exp(half_psi[i] - m) + std::exp(half_psi[j] - m));
  }
  if (nodes % 2 == 1) {
    sum += rule.weights[nodes / 2] * std::exp(half_psi[nodes / 2] - m);
  }
  const double log_rho = m + std::log(sum) + std::log(length);
  return std::exp(log_rho);
}

RhoPair saturate(double rho, double psi_a, double psi_b, double N) {
  if (!(N > 0.0)) {
    throw ArgumentError("metric scale N must be positive");
  }
  RhoPair out;
  out.rho_n = std::min(N * rho, 1.0);
  if (out.rho_n == 0.0) {
    return out;
  }
  // log(1 + e^a + e^b)
  const double m = std::max({0.0, psi_a, psi_b});
  const double log_weight = m + std::log(std::exp(-m) + std::exp(psi_a - m) + std::exp(psi_b - m));
  out.rho_tilde = std::exp(0.5 * (std::log(out.rho_n) + log_weight));
  return out;
}

RhoPair rho_N_and_tilde(const PhasePoint& a, const PhasePoint& b, const models::ModelSpec& model,
                        const MetricParams& metric) {
  const double rho = rho_line(a, b, model, metric);
  return saturate(rho, lyapunov::psi(a.state, a.history, model, metric.params),
                  lyapunov::psi(b.state, b.history, model, metric.params), metric.N);
}

}  // namespace memwalk::ergodics
