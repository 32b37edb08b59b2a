#include "memwalk/variational/zeta.hpp"

#include "memwalk/integrator/trajectory_io.hpp"

#include <cmath>
#include <ostream>

namespace memwalk::variational {
namespace {

// int grad H(x - eta(s)) (px - pi_eta(s)) K(s) ds over the stored samples plus the tails
Vec memory_term(const Vec& x, const Vec& px, const HistoryBuffer& path, const HistoryBuffer& eta,
                const models::ModelSpec& model, const std::vector<double>& weights) {
  const int d = static_cast<int>(x.size());
  Vec sum = zero_vec(d);
  const int n = std::min(path.size(), eta.size());
  for (int k = 0; k < n; ++k) {
    if (weights[k] == 0.0) {
      continue;
    }
    const Vec r = x - Eigen::Map<const Vec>(path.sample_data(k), d);
    const Vec diff = px - Eigen::Map<const Vec>(eta.sample_data(k), d);
    sum += weights[k] * (models::pilot_jacobian(model.pilot, r) * diff);
  }
  if (path.has_tail() && eta.has_tail()) {
    const double mass = state::tail_integral(model.kernel, path.stored_span());
    sum += mass * (models::pilot_jacobian(model.pilot, x - path.tail()) * (px - eta.tail()));
  }
  return sum;
}

}  // namespace

ZetaSeries zeta_control(const integrator::Trajectory& traj, const Vec& initial_past, const VariationalSeries& rho,
                        const models::ModelSpec& model, double rate_alpha) {
  if (traj.record_stride != 1 || traj.states.size() != traj.times.size() || traj.states.empty()) {
    throw ArgumentError("zeta_control: the trajectory must keep every step");
  }
  if (std::abs(traj.dt - rho.dt) > 1e-15 * traj.dt) {
    throw ArgumentError("zeta_control: trajectory and rho series use different dt");
  }
  if (rho.times.size() < traj.times.size()) {
    throw ArgumentError("zeta_control: rho series is shorter than the trajectory");
  }
  const double a = rate_alpha;
  const bool pilot_active = model.pilot.kind != models::PilotKind::zero;
  HistoryBuffer path = HistoryBuffer::constant_past(initial_past, traj.dt, rho.initial_eta.n_mem());
  path.push(traj.states.front().x);
  HistoryBuffer eta = rho.initial_eta;
  const auto weights = state::trapezoid_weights(model.kernel, traj.dt, path.capacity());

  ZetaSeries out;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k > 0) {
      path.push(traj.states[k].x);
      eta.push(rho.px[k]);
    }
    const Vec& x = traj.states[k].x;
    const Vec& px = rho.px[k];
    const Vec& pv = rho.pv[k];
    Vec z = -pv + 5.0 * a * pv + 6.0 * a * a * px - models::smooth_hessian(model.smooth, x) * px;
    bool unreliable = x.norm() < model.x_min;
    if (models::is_singular(model.singular)) {
      if (x.norm() == 0.0) {
        unreliable = true;
      } else {
        z -= models::singular_hessian(model.singular, x) * px;
      }
    }
    if (pilot_active) {
      z -= memory_term(x, px, path, eta, model, weights);
    }
    out.times.push_back(traj.times[k]);
    out.zeta.push_back(z);
    out.unreliable.push_back(unreliable);
    out.unreliable_count += unreliable ? 1 : 0;
    if (std::isfinite(z.squaredNorm())) {
      out.energy += traj.dt * z.squaredNorm();
    }
  }
  return out;
}

void write_zeta_csv(std::ostream& out, const ZetaSeries& series) {
  using integrator::format_number;
  const int d = series.zeta.empty() ? 0 : static_cast<int>(series.zeta.front().size());
  out << "t";
  for (int i = 1; i <= d; ++i) {
    out << ",zeta" << i;
  }
  out << ",unreliable\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << format_number(series.times[k]);
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(series.zeta[k][i]);
    }
    out << ',' << (series.unreliable[k] ? 1 : 0) << '\n';
  }
}

}  // namespace memwalk::variational
