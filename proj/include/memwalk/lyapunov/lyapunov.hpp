#pragma once

#include "memwalk/integrator/ensemble.hpp"
#include "memwalk/models/model.hpp"
#include "memwalk/state/history.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace memwalk::lyapunov {

using state::HistoryBuffer;
using state::WalkerState;

struct LyapunovParams {
  double kappa = 0.125;
  double p2 = 1.5;
  double a1 = 1.0;
  double safety = 0.5;
  /// Sampled constants of c (U + |v|^2/2) <= Phi - G <= C (U + |v|^2/2).
  double c_kappa = std::numeric_limits<double>::quiet_NaN();
  double C_kappa = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// min{1/(2(1 + 1/a1)), a1/2}
double kappa_bound(double a1);

struct SandwichPlan {
  double r_min = 1e-3;
  double r_max = 1e2;
  int radii = 41;
  int speeds = 41;
  int directions = 8;
  std::uint64_t seed = 0;
};

/// kappa = safety * kappa_bound(a1) with a1 from the model, plus sampled sandwich constants.
/// Throws ArgumentError unless 0 < safety < 1 and a1 > 0. A sandwich violation (no positive
/// lower constant, possible when U < 1 somewhere) is reported in `warnings` with the point.
LyapunovParams choose_kappa(const models::ModelSpec& model, double safety = 0.5, double p2 = 1.5,
                            const SandwichPlan& plan = {});

/// U + G + |v|^2/2 + kappa <x, v> - <x, v>/|x|. Throws SingularityError at x = 0.
double phi(const WalkerState& s, const models::ModelSpec& model, const LyapunovParams& params);

/// phi + ||eta||_{p2}^{p2}.
double psi(const WalkerState& s, const HistoryBuffer& buffer, const models::ModelSpec& model,
           const LyapunovParams& params);
double psi(const WalkerState& s, const HistoryBuffer& buffer, const models::ModelSpec& model,
           const LyapunovParams& params, const std::vector<double>& weights);

/// Observable "psi" for ensembles run at (dt, n_mem).
integrator::NamedObservable psi_observable(const models::ModelSpec& model, const LyapunovParams& params,
                                           double dt, int n_mem);

/// sum over recorded states of w e^{-discount t} e^{G(x)} / |x|^beta1, w the recording interval.
double discounted_singular_moment(const integrator::Trajectory& traj, const models::ModelSpec& model,
                                  double discount);

}  // namespace memwalk::lyapunov
