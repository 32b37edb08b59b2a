#pragma once

#include "memwalk/integrator/ensemble.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memwalk::ergodics {

struct MixingFit {
  std::string observable;
  std::vector<double> times;
  /// |mean_A f - mean_B f| and its pooled standard error.
  std::vector<double> distance;
  std::vector<double> stderr_;
  /// Non-increasing majorant max_{s >= t} D(s) inside the window.
  std::vector<double> envelope;

  /// D never exceeds 3 standard errors.
  bool already_mixed = false;
  double window_end = 0.0;
  int window_points = 0;
  /// log envelope = log C - c t on the window.
  double rate = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  double r2_threshold = 0.8;

  bool rate_reported() const { return !already_mixed && window_points >= 3 && r2 >= r2_threshold; }
  std::string verdict() const;
};

/// D(t) = |mean_A f - mean_B f| on the shared grid. The decay is fitted on
/// [0, last t with D > 3 SE] by least squares of the log of the non-increasing majorant of D.
MixingFit mixing_rate(const integrator::Ensemble& a, const integrator::Ensemble& b, const std::string& observable,
                      double r2_threshold = 0.8);

/// CSV `t,D,stderr`.
void write_mixing_csv(std::ostream& out, const MixingFit& fit);
/// One-line JSON `{"c": .., "C": .., "r2": ..}` (plus the verdict).
std::string mixing_summary_json(const MixingFit& fit);

}  // namespace memwalk::ergodics
