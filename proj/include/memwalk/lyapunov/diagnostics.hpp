#pragma once

#include "memwalk/integrator/ensemble.hpp"
#include "memwalk/lyapunov/lyapunov.hpp"

#include <iosfwd>
#include <vector>

namespace memwalk::lyapunov {

/// exp(psi) above this overflows a double.
inline constexpr double kExpOverflow = 709.78;

/// log((1/n) sum exp(a_i)) without overflow.
double log_mean_exp(const std::vector<double>& a);

struct LogMeanEstimate {
  double log_mean = 0.0;
  /// Jackknife standard error of log_mean.
  double stderr_ = 0.0;
  double overflow_fraction = 0.0;
};

/// Log-space mean of exp(a_i) with a jackknife standard error.
LogMeanEstimate log_mean_exp_jackknife(const std::vector<double>& a);

struct ExpMomentPoint {
  double t;
  double log_mean;
  double stderr_;
  double overflow_fraction;
};

struct EnvelopeFit {
  bool fitted = false;
  /// Terminal plateau of E exp(psi) (log).
  double log_plateau = 0.0;
  /// Decay rate c1 of log(E exp(psi) - C1).
  double rate = 0.0;
  /// Envelope C1 e^{-c1 t} exp(psi(0)) + C1: C1 = max(plateau, fitted prefactor).
  double log_c1 = 0.0;
  double r2 = 0.0;
};

struct ExpMomentDiagnostic {
  std::vector<ExpMomentPoint> series;
  EnvelopeFit envelope;
};

/// Per-time log-space mean of exp(psi) over the ensemble's per-member "psi" values at the
/// recorded times closest to `times`. The ensemble must keep member values of an observable
/// named "psi" (see psi_observable). The envelope is fitted when the series decreases, with the
/// plateau taken over t >= plateau_start.
ExpMomentDiagnostic exp_moment_diagnostic(const integrator::Ensemble& ensemble, const std::vector<double>& times,
                                          double plateau_start);

/// CSV `t,mean,stderr,overflow_fraction` (mean is the log-space mean).
void write_exp_moment_csv(std::ostream& out, const ExpMomentDiagnostic& diag);

/// Descent check on a log-mean series:
///   level L and spread w are the mean and standard deviation of the series for t >= terminal_start;
///   point k passes when m_k <= max(m_j, L + 2w) + slack sqrt(s_j^2 + s_k^2) for every j < k;
///   the terminal window is flat when its least-squares slope is within 3 standard errors of 0.
struct DescentAssessment {
  double level = 0.0;
  double spread = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> rising_times;
  bool non_increasing = false;
  bool terminally_flat = false;
  bool starts_above_level = false;
  bool passed() const { return non_increasing && terminally_flat && starts_above_level; }
};

DescentAssessment assess_descent(const std::vector<ExpMomentPoint>& series, double terminal_start,
                                 double slack = 1.0);

}  // namespace memwalk::lyapunov
