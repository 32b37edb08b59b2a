#pragma once

#include "memwalk/integrator/stepper.hpp"

#include <functional>
#include <string>
#include <vector>

namespace memwalk::integrator {

/// Scalar observable of the full state (x, v, eta).
using ObservableFn = std::function<double(const WalkerState&, const HistoryBuffer&)>;

struct NamedObservable {
  std::string name;
  ObservableFn fn;
};

NamedObservable observable_radius();     // |x|
NamedObservable observable_coordinate(int axis);  // x_axis
NamedObservable observable_speed_sq();   // |v|^2

/// Streaming mean/variance (Welford), mergeable (Chan et al.).
struct RunningStats {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double value);
  void merge(const RunningStats& other);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_of_mean() const;
};

struct ObservableSeries {
  std::string name;
  /// One entry per recorded time.
  std::vector<RunningStats> stats;
  /// values[member][time], only with EnsembleOptions::keep_member_values.
  std::vector<std::vector<double>> values;
};

struct EnsembleOptions {
  /// Worker threads; 0 selects the hardware concurrency.
  int threads = 0;
  bool keep_member_values = false;
  bool keep_trajectories = false;
};

struct Ensemble {
  SimConfig config;
  int n_members = 0;
  std::vector<double> times;
  std::vector<ObservableSeries> series;
  /// Indices of members that aborted; they are excluded from the statistics.
  std::vector<int> aborted;
  std::vector<std::string> abort_messages;
  std::vector<Trajectory> trajectories;
  long singularity_events = 0;

  const ObservableSeries& find(const std::string& name) const;
};

/// Member i runs simulate(config, ., i). Statistics are merged in member order, so the
/// result does not depend on the thread count or scheduling.
Ensemble simulate_ensemble(const SimConfig& config, int n_members,
                           const std::vector<NamedObservable>& observables,
                           const EnsembleOptions& options = {});

int resolve_threads(int requested);

}  // namespace memwalk::integrator
