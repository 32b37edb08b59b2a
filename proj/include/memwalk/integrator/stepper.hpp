#pragma once

#include "memwalk/integrator/memory.hpp"
#include "memwalk/models/model.hpp"
#include "memwalk/rng.hpp"
#include "memwalk/state/history.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace memwalk::integrator {

using state::HistoryBuffer;
using state::WalkerState;

/// Largest number of local dt halvings in guarded mode.
inline constexpr int kMaxGuardHalvings = 8;

/// One explicit Euler-Maruyama step, drift at the pre-step state:
///   x+ = x + v dt
///   v+ = v + (dt/m)(-v - grad U - grad G + memory force) + (sigma/m) sqrt(dt) gauss
/// The buffer receives x+ and the time advances by dt.
std::pair<WalkerState, HistoryBuffer> em_step(const WalkerState& state, const HistoryBuffer& buffer,
                                              const models::ModelSpec& model, double dt,
                                              const Vec& gauss);

struct StepInfo {
  /// |x+| < x_min after the step.
  bool near_singular = false;
  /// Local substeps used (1 unless guarded mode refined the step).
  int substeps = 1;
  bool memory_warning = false;
};

/// In-place form of em_step with cached quadrature weights.
StepInfo em_step_inplace(WalkerState& state, HistoryBuffer& buffer, const models::ModelSpec& model,
                         const MemoryQuadrature& quad, double dt, const Vec& gauss);

/// Guarded step: when |x+| < x_min (or x+ leaves the domain) the step is redone with
/// 2, 4, ... 2^8 substeps of a Brownian bridge refinement of the same increment; the memory
/// force is re-evaluated at each substep against the unchanged buffer, and only the end
/// point is pushed. `rng` supplies the bridge variates.
StepInfo em_step_guarded(WalkerState& state, HistoryBuffer& buffer, const models::ModelSpec& model,
                         const MemoryQuadrature& quad, double dt, const Vec& gauss, Rng& rng);

struct SimConfig {
  models::ModelSpec model;
  double dt = 1.0 / 64.0;
  double t_max = 2000.0;
  double burn_in = 500.0;
  Vec x0;
  Vec v0;
  Vec initial_past;
  int record_stride = 8;
  std::uint64_t seed = 0;

  /// History length in steps; <= 0 selects state::default_memory_steps.
  int n_mem = 0;
  bool guarded = false;
  /// Each step consumes 2^noise_refinement normal vectors and combines them, so a run at dt
  /// with refinement r shares its Brownian path with a run at dt/2^r and refinement 0.
  int noise_refinement = 0;
  /// Store recorded states in the trajectory (observers run either way).
  bool keep_states = true;
};

/// Throws ArgumentError on invalid configurations.
void check_config(const SimConfig& config);
int memory_steps(const SimConfig& config);
long total_steps(const SimConfig& config);

struct TrajectoryEvent {
  enum class Kind { singularity_proximity, memory_truncation, guarded_refinement };
  Kind kind;
  long step;
  double t;
  double radius;
};

std::string_view to_string(TrajectoryEvent::Kind kind);

/// Event log entries kept per trajectory; further events are only counted.
inline constexpr std::size_t kMaxLoggedEvents = 1000;

struct Trajectory {
  int dim = 0;
  double dt = 0.0;
  int record_stride = 1;
  std::uint64_t stream = 0;
  std::vector<double> times;
  std::vector<WalkerState> states;
  std::vector<TrajectoryEvent> events;
  long singularity_events = 0;
  long truncation_warnings = 0;
  long guarded_steps = 0;
  double min_radius = 0.0;

  bool aborted = false;
  std::string abort_message;
  long abort_step = -1;
  WalkerState last_finite;

  /// State at the end of the run, for checkpointing.
  long steps_done = 0;
  WalkerState final_state;
  HistoryBuffer final_buffer;
  Rng::State final_rng;
};

/// Called at every recorded step (step index multiple of record_stride, including 0).
using Observer = std::function<void(long step, const WalkerState&, const HistoryBuffer&)>;

/// Runs member `member` of the seeded family (member 0 is the plain simulation).
Trajectory simulate(const SimConfig& config, const Observer& observer = nullptr,
                    std::uint64_t member = 0);

/// Continues a run from a saved state, buffer and generator up to config.t_max.
Trajectory resume(const SimConfig& config, const WalkerState& state, const HistoryBuffer& buffer,
                  const Rng::State& rng, long step, const Observer& observer = nullptr);

}  // namespace memwalk::integrator
