#include "memwalk/integrator/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace memwalk::integrator {

NamedObservable observable_radius() {
  return {"radius", [](const WalkerState& s, const HistoryBuffer&) { return s.x.norm(); }};
}

NamedObservable observable_coordinate(int axis) {
  return {"x" + std::to_string(axis + 1), [axis](const WalkerState& s, const HistoryBuffer&) { return s.x[axis]; }};
}

NamedObservable observable_speed_sq() {
  return {"speed_sq", [](const WalkerState& s, const HistoryBuffer&) { return s.v.squaredNorm(); }};
}

void RunningStats::add(double value) {
  ++n;
  const double delta = value - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (value - mean);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n == 0) {
    return;
  }
  if (n == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n + other.n);
  const double delta = other.mean - mean;
  mean += delta * static_cast<double>(other.n) / total;
  m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
  n += other.n;
}

double RunningStats::stderr_of_mean() const {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

const ObservableSeries& Ensemble::find(const std::string& name) const {
  for (const auto& s : series) {
    if (s.name == name) {
      return s;
    }
  }
  throw ArgumentError("no observable named " + name);
}

int resolve_threads(int requested) {
  if (requested > 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Ensemble simulate_ensemble(const SimConfig& config, int n_members,
                           const std::vector<NamedObservable>& observables,
                           const EnsembleOptions& options) {
  if (n_members < 1) {
    throw ArgumentError("ensemble needs at least one member");
  }
  check_config(config);
  const std::size_t n_obs = observables.size();

  struct MemberResult {
    std::vector<std::vector<double>> values;  // [observable][time]
    Trajectory traj;
  };
  std::vector<MemberResult> results(static_cast<std::size_t>(n_members));

  SimConfig member_config = config;
  member_config.keep_states = options.keep_trajectories;

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n_members; i = next.fetch_add(1)) {
      MemberResult& res = results[static_cast<std::size_t>(i)];
      res.values.assign(n_obs, {});
      Observer obs = [&](long, const WalkerState& s, const HistoryBuffer& b) {
        for (std::size_t j = 0; j < n_obs; ++j) {
          res.values[j].push_back(observables[j].fn(s, b));
        }
      };
      res.traj = simulate(member_config, obs, static_cast<std::uint64_t>(i));
      res.traj.final_buffer = HistoryBuffer();  // release the history memory early
    }
  };
  const int n_threads = std::min(resolve_threads(options.threads), n_members);
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }

  Ensemble ens;
  ens.config = config;
  ens.n_members = n_members;
  ens.series.resize(n_obs);
  for (std::size_t j = 0; j < n_obs; ++j) {
    ens.series[j].name = observables[j].name;
  }
  // reference time grid from the first member that completed
  for (const auto& r : results) {
    if (!r.traj.aborted) {
      ens.times = r.traj.times;
      break;
    }
  }
  for (auto& s : ens.series) {
    s.stats.assign(ens.times.size(), RunningStats{});
  }
  for (int i = 0; i < n_members; ++i) {
    MemberResult& r = results[static_cast<std::size_t>(i)];
    ens.singularity_events += r.traj.singularity_events;
    if (r.traj.aborted) {
      ens.aborted.push_back(i);
      ens.abort_messages.push_back(r.traj.abort_message);
    } else {
      for (std::size_t j = 0; j < n_obs; ++j) {
        auto& stats = ens.series[j].stats;
        for (std::size_t k = 0; k < stats.size(); ++k) {
          stats[k].add(r.values[j][k]);
        }
        if (options.keep_member_values) {
          ens.series[j].values.push_back(std::move(r.values[j]));
        }
      }
    }
    if (options.keep_trajectories) {
      ens.trajectories.push_back(std::move(r.traj));
    }
  }
  return ens;
}

}  // namespace memwalk::integrator
