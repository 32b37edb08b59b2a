#pragma once

#include "memwalk/integrator/stepper.hpp"

#include <vector>

namespace memwalk::ergodics {

/// Asymptotic Kolmogorov constant for the 5% level.
inline constexpr double kKsCritical05 = 1.3581;

/// tau = sum_{k >= 1} rho_k by the initial positive sequence (Geyer): pair sums
/// rho_{2m} + rho_{2m+1} are accumulated while positive. n_eff = n / (2 tau + 1).
double integrated_autocorrelation(const std::vector<double>& series);

/// Two-sample KS statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct StationarityResult {
  double ks = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  long n_first = 0;
  long n_second = 0;
  double tau_first = 0.0;
  double tau_second = 0.0;
  double n_first_eff = 0.0;
  double n_second_eff = 0.0;
  bool stationary() const { return ks < critical; }
};

/// KS between the two parts of a series split at `split` (fraction of the length), with
/// autocorrelation-corrected sample sizes.
StationarityResult stationarity_test(const std::vector<double>& series, double split);

/// Same on the post-burn-in radii of a trajectory. Needs at least 80 samples.
StationarityResult stationarity_test(const integrator::Trajectory& traj, double burn_in, double split);

}  // namespace memwalk::ergodics
