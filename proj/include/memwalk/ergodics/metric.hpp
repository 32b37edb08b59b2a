#pragma once

#include "memwalk/lyapunov/lyapunov.hpp"

namespace memwalk::ergodics {

using state::HistoryBuffer;
using state::WalkerState;

struct MetricParams {
  double N = 1.0;
  lyapunov::LyapunovParams params;
  /// Segments whose position part comes closer than this to the origin get rho = +inf.
  double x_min = 1e-8;
};

inline constexpr int kMetricNodes = 64;

/// Full state (x, v, eta).
struct PhasePoint {
  WalkerState state;
  HistoryBuffer history;
};

/// Distance from the origin to the segment [a, b].
double segment_distance_to_origin(const Vec& a, const Vec& b);

/// Sample-wise s a + (1 - s) b; both buffers must share dt, horizon, fill and tail presence.
HistoryBuffer interpolate_history(const HistoryBuffer& a, const HistoryBuffer& b, double s, double one_minus_s);

/// |x - x'| + |v - v'| + ||eta - eta'||_{p2}
double phase_distance(const PhasePoint& a, const PhasePoint& b, const models::ModelSpec& model, double p2);

/// Straight-line upper bound on rho: integral over s in [0, 1] of exp(psi(gamma(s))/2) ||X - X'||
/// by `nodes`-point Gauss-Legendre. +inf when the position segment meets the x_min ball.
double rho_line(const PhasePoint& a, const PhasePoint& b, const models::ModelSpec& model, const MetricParams& metric,
                int nodes = kMetricNodes);

struct RhoPair {
  double rho_n = 0.0;
  double rho_tilde = 0.0;
};

/// rho_N = min(N rho, 1); rho~_N = sqrt(rho_N (1 + e^psi_a + e^psi_b)) in log space.
RhoPair saturate(double rho, double psi_a, double psi_b, double N);
RhoPair rho_N_and_tilde(const PhasePoint& a, const PhasePoint& b, const models::ModelSpec& model,
                        const MetricParams& metric);

}  // namespace memwalk::ergodics
