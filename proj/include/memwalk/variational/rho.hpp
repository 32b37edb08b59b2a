#pragma once

#include "memwalk/models/kernel.hpp"
#include "memwalk/state/history.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace memwalk::variational {

using state::HistoryBuffer;

/// Initial perturbation xi = (pi_x xi, pi_v xi, pi_eta xi) with a constant history part.
struct Perturbation {
  Vec x;
  Vec v;
  Vec eta;

  static Perturbation position(const Vec& x);  // (x, 0, 0)
  static Perturbation velocity(const Vec& v);  // (0, v, 0)
};

/// |pi_x xi| + |pi_v xi| + ||pi_eta xi||_{p2} for the constant history part.
double perturbation_norm(const Perturbation& xi, const models::KernelSpec& kernel, double p2);

/// pi_x rho = (3 xi_x + xi_v/a) e^{-2at} - (2 xi_x + xi_v/a) e^{-3at},
/// pi_v rho = -2a (3 xi_x + xi_v/a) e^{-2at} + 3a (2 xi_x + xi_v/a) e^{-3at}.
std::pair<Vec, Vec> rho_closed_form(const Vec& xi_x, const Vec& xi_v, double rate_alpha, double t);

/// d/dt (pi_x, pi_v) = (pi_v, -5a pi_v - 6a^2 pi_x)
std::pair<Vec, Vec> rho_rhs(const Vec& px, const Vec& pv, double rate_alpha);

/// C with |pi_x rho| + |pi_v rho| <= C e^{-2at}, from the closed-form coefficients.
double decay_envelope_constant(const Vec& xi_x, const Vec& xi_v, double rate_alpha);

struct VariationalSeries {
  double rate_alpha = 1.0;
  double dt = 0.0;
  double p2 = 1.5;
  std::vector<double> times;
  std::vector<Vec> px;
  std::vector<Vec> pv;
  /// ||pi_eta rho_t||_{p2}
  std::vector<double> eta_norm;
  HistoryBuffer initial_eta;
  HistoryBuffer final_eta;
};

struct RhoNumericOptions {
  models::KernelSpec kernel = models::KernelSpec::exponential(1.0, 1.0);
  double p2 = 1.5;
  /// <= 0 selects the default horizon of the kernel.
  int n_mem = 0;
};

/// RK4 for the (x, v) block; the eta block is a history buffer of pi_x rho
/// (pi_eta rho_t(0) = pi_x rho_t). Point k is at t = k dt, k = 0..round(t_end/dt).
VariationalSeries rho_numeric(const Perturbation& xi, double rate_alpha, double dt, double t_end,
                              const RhoNumericOptions& options = {});

/// CSV `t,px1..pxd,pv1..pvd,eta_norm`.
void write_rho_csv(std::ostream& out, const VariationalSeries& series);

}  // namespace memwalk::variational
