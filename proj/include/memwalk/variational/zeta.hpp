#pragma once

#include "memwalk/integrator/stepper.hpp"
#include "memwalk/variational/rho.hpp"

#include <iosfwd>
#include <vector>

namespace memwalk::variational {

struct ZetaSeries {
  std::vector<double> times;
  std::vector<Vec> zeta;
  /// |x(t)| < x_min at these points.
  std::vector<bool> unreliable;
  long unreliable_count = 0;
  /// sum dt |zeta|^2
  double energy = 0.0;
};

/// zeta = -pi_v + 5a pi_v + 6a^2 pi_x - grad^2 U pi_x - grad^2 G pi_x
///        - int grad H(x - eta(s)) (pi_x - pi_eta(s)) K(s) ds,
/// with the memory integral on the trapezoid weights plus the constant tails. The
/// trajectory must be recorded at every step with states kept; its history is rebuilt
/// from `initial_past` exactly as the simulator does. `rho` must share dt and cover
/// the trajectory's times.
ZetaSeries zeta_control(const integrator::Trajectory& traj, const Vec& initial_past, const VariationalSeries& rho,
                        const models::ModelSpec& model, double rate_alpha);

/// CSV `t,zeta1..zetad,unreliable`.
void write_zeta_csv(std::ostream& out, const ZetaSeries& series);

}  // namespace memwalk::variational
