#include "memwalk/variational/rho.hpp"

#include "memwalk/integrator/trajectory_io.hpp"

#include <cmath>
#include <ostream>

namespace memwalk::variational {

Perturbation Perturbation::position(const Vec& x) { return {x, zero_vec(static_cast<int>(x.size())), zero_vec(static_cast<int>(x.size()))}; }

Perturbation Perturbation::velocity(const Vec& v) { return {zero_vec(static_cast<int>(v.size())), v, zero_vec(static_cast<int>(v.size()))}; }

double perturbation_norm(const Perturbation& xi, const models::KernelSpec& kernel, double p2) {
  // constant history: (|c|^p2 int K)^(1/p2)
  const double mass = state::tail_integral(kernel, 0.0);
  return xi.x.norm() + xi.v.norm() + xi.eta.norm() * std::pow(mass, 1.0 / p2);
}

std::pair<Vec, Vec> rho_closed_form(const Vec& xi_x, const Vec& xi_v, double rate_alpha, double t) {
  if (!(rate_alpha > 0.0)) {
    throw ArgumentError("rate_alpha must be positive");
  }
  if (t < 0.0) {
    throw DomainError("rho_closed_form: negative time");
  }
  const double a = rate_alpha;
  const Vec slow = 3.0 * xi_x + xi_v / a;
  const Vec fast = 2.0 * xi_x + xi_v / a;
  const double e2 = std::exp(-2.0 * a * t);
  const double e3 = std::exp(-3.0 * a * t);
  return {slow * e2 - fast * e3, -2.0 * a * slow * e2 + 3.0 * a * fast * e3};
}

std::pair<Vec, Vec> rho_rhs(const Vec& px, const Vec& pv, double rate_alpha) {
  return {pv, -5.0 * rate_alpha * pv - 6.0 * rate_alpha * rate_alpha * px};
}

double decay_envelope_constant(const Vec& xi_x, const Vec& xi_v, double rate_alpha) {
  // e^{-3at} <= e^{-2at}: bound each exponential by the slower one
  const double a = rate_alpha;
  const double slow = (3.0 * xi_x + xi_v / a).norm();
  const double fast = (2.0 * xi_x + xi_v / a).norm();
  return (1.0 + 2.0 * a) * slow + (1.0 + 3.0 * a) * fast;
}

VariationalSeries rho_numeric(const Perturbation& xi, double rate_alpha, double dt, double t_end,
                              const RhoNumericOptions& options) {
  if (!(dt > 0.0)) {
    throw ArgumentError("rho_numeric: dt must be positive");
  }
  if (!(rate_alpha > 0.0)) {
    throw ArgumentError("rate_alpha must be positive");
  }
  if (t_end < 0.0) {
    throw DomainError("rho_numeric: negative t_end");
  }
  const int d = static_cast<int>(xi.x.size());
  if (xi.v.size() != d || xi.eta.size() != d) {
    throw ArgumentError("rho_numeric: perturbation components differ in dimension");
  }
  const int n_mem = options.n_mem > 0 ? options.n_mem : state::default_memory_steps(options.kernel, dt);
  const auto weights = state::trapezoid_weights(options.kernel, dt, n_mem + 1);

  VariationalSeries out;
  out.rate_alpha = rate_alpha;
  out.dt = dt;
  out.p2 = options.p2;
  HistoryBuffer eta = HistoryBuffer::constant_past(xi.eta, dt, n_mem);
  eta.push(xi.x);
  out.initial_eta = eta;

  Vec px = xi.x;
  Vec pv = xi.v;
  const long steps = std::lround(t_end / dt);
  auto record = [&](long k) {
    out.times.push_back(k * dt);
    out.px.push_back(px);
    out.pv.push_back(pv);
    out.eta_norm.push_back(state::weighted_norm(eta, options.kernel, options.p2, weights).value);
  };
  record(0);
  for (long k = 1; k <= steps; ++k) {
    const auto [k1x, k1v] = rho_rhs(px, pv, rate_alpha);
    const auto [k2x, k2v] = rho_rhs(px + 0.5 * dt * k1x, pv + 0.5 * dt * k1v, rate_alpha);
    const auto [k3x, k3v] = rho_rhs(px + 0.5 * dt * k2x, pv + 0.5 * dt * k2v, rate_alpha);
    const auto [k4x, k4v] = rho_rhs(px + dt * k3x, pv + dt * k3v, rate_alpha);
    px += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    pv += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    eta.push(px);
    record(k);
  }
  out.final_eta = eta;
  return out;
}

void write_rho_csv(std::ostream& out, const VariationalSeries& series) {
  using integrator::format_number;
  const int d = series.px.empty() ? 0 : static_cast<int>(series.px.front().size());
  out << "t";
  for (int i = 1; i <= d; ++i) {
    out << ",px" << i;
  }
  for (int i = 1; i <= d; ++i) {
    out << ",pv" << i;
  }
  out << ",eta_norm\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << format_number(series.times[k]);
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(series.px[k][i]);
    }
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(series.pv[k][i]);
    }
    out << ',' << format_number(series.eta_norm[k]) << '\n';
  }
}

}  // namespace memwalk::variational
