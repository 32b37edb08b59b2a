#include "memwalk/integrator/stepper.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace memwalk::integrator {
namespace {

bool too_close(const models::ModelSpec& model, const Vec& x) {
  if (!models::is_singular(model.singular)) {
    return false;
  }
  return !models::in_domain(model, x) || x.squaredNorm() < model.x_min * model.x_min;
}

// Euler-Maruyama update of (x, v) with drift at the pre-step state; no buffer push.
void advance(Vec& x, Vec& v, const HistoryBuffer& buffer, const models::ModelSpec& model,
             const MemoryQuadrature& quad, double h, const Vec& noise_increment, bool& memory_warning) {
  const models::Forces f = models::eval_forces(model, x);
  const MemoryForce mem = memory_force(x, buffer, model, quad);
  memory_warning = memory_warning || mem.warning;
  const Vec drift = -v - f.grad_u - f.grad_g + mem.value;
  const Vec v_new = v + (h / model.mass) * drift + (model.sigma / model.mass) * noise_increment;
  x += h * v;
  v = v_new;
}

// Splits every Brownian increment over an interval of length h into two halves.
std::vector<Vec> refine_bridge(const std::vector<Vec>& increments, double h, Rng& rng) {
  std::vector<Vec> out;
  out.reserve(increments.size() * 2);
  const double spread = 0.5 * std::sqrt(h);
  for (const Vec& inc : increments) {
    Vec first(inc.size());
    for (int i = 0; i < inc.size(); ++i) {
      first[i] = 0.5 * inc[i] + spread * rng.normal();
    }
    out.push_back(first);
    out.push_back(inc - first);
  }
  return out;
}

std::string describe(const WalkerState& s) {
  std::ostringstream os;
  os.precision(17);
  os << "t = " << s.t << ", x = (";
  for (int i = 0; i < s.x.size(); ++i) {
    os << (i ? ", " : "") << s.x[i];
  }
  os << "), v = (";
  for (int i = 0; i < s.v.size(); ++i) {
    os << (i ? ", " : "") << s.v[i];
  }
  os << ")";
  return os.str();
}

void log_event(Trajectory& traj, TrajectoryEvent::Kind kind, long step, double t, double radius) {
  if (traj.events.size() < kMaxLoggedEvents) {
    traj.events.push_back({kind, step, t, radius});
  }
}

void run(const SimConfig& config, WalkerState state, HistoryBuffer buffer, Rng rng, long step,
         bool record_initial, const Observer& observer, Trajectory& traj) {
  const models::ModelSpec& model = config.model;
  const MemoryQuadrature quad(model.kernel, config.dt, buffer.n_mem());
  const long n_total = total_steps(config);
  const int d = model.dimension;
  const int draws = 1 << config.noise_refinement;
  traj.min_radius = std::min(traj.min_radius, state.x.norm());

  auto record = [&]() {
    if (step % config.record_stride != 0) {
      return;
    }
    traj.times.push_back(state.t);
    if (config.keep_states) {
      traj.states.push_back(state);
    }
    if (observer) {
      observer(step, state, buffer);
    }
  };
  if (record_initial) {
    record();
  }

  Vec gauss(d);
  while (step < n_total) {
    gauss.setZero();
    for (int j = 0; j < draws; ++j) {
      for (int i = 0; i < d; ++i) {
        gauss[i] += rng.normal();
      }
    }
    gauss /= std::sqrt(static_cast<double>(draws));

    const WalkerState previous = state;
    StepInfo info;
    try {
      info = config.guarded ? em_step_guarded(state, buffer, model, quad, config.dt, gauss, rng)
                            : em_step_inplace(state, buffer, model, quad, config.dt, gauss);
    } catch (const SingularityError& e) {
      traj.aborted = true;
      traj.abort_step = step;
      traj.last_finite = previous;
      traj.abort_message = std::string(e.what()) + " at step " + std::to_string(step) + "; last finite state " +
                           describe(previous);
      break;
    }
    ++step;
    state.t = step * config.dt;

    if (!state.x.allFinite() || !state.v.allFinite()) {
      traj.aborted = true;
      traj.abort_step = step;
      traj.last_finite = previous;
      traj.abort_message = "non-finite state at step " + std::to_string(step) + "; last finite state " +
                           describe(previous);
      break;
    }
    const double r = state.x.norm();
    traj.min_radius = std::min(traj.min_radius, r);
    if (info.near_singular) {
      ++traj.singularity_events;
      log_event(traj, TrajectoryEvent::Kind::singularity_proximity, step, state.t, r);
    }
    if (info.memory_warning) {
      ++traj.truncation_warnings;
      log_event(traj, TrajectoryEvent::Kind::memory_truncation, step, state.t, r);
    }
    if (info.substeps > 1) {
      ++traj.guarded_steps;
      log_event(traj, TrajectoryEvent::Kind::guarded_refinement, step, state.t, r);
    }
    record();
  }
  traj.steps_done = step;
  traj.final_state = state;
  traj.final_buffer = std::move(buffer);
  traj.final_rng = rng.state();
}

}  // namespace

std::pair<WalkerState, HistoryBuffer> em_step(const WalkerState& state, const HistoryBuffer& buffer,
                                              const models::ModelSpec& model, double dt,
                                              const Vec& gauss) {
  WalkerState s = state;
  HistoryBuffer b = buffer;
  const MemoryQuadrature quad(model.kernel, buffer.dt(), buffer.n_mem());
  em_step_inplace(s, b, model, quad, dt, gauss);
  return {std::move(s), std::move(b)};
}

StepInfo em_step_inplace(WalkerState& state, HistoryBuffer& buffer, const models::ModelSpec& model,
                         const MemoryQuadrature& quad, double dt, const Vec& gauss) {
  StepInfo info;
  advance(state.x, state.v, buffer, model, quad, dt, std::sqrt(dt) * gauss, info.memory_warning);
  buffer.push(state.x);
  state.t += dt;
  info.near_singular = too_close(model, state.x);
  return info;
}

StepInfo em_step_guarded(WalkerState& state, HistoryBuffer& buffer, const models::ModelSpec& model,
                         const MemoryQuadrature& quad, double dt, const Vec& gauss, Rng& rng) {
  StepInfo info;
  const Vec total = std::sqrt(dt) * gauss;
  Vec x = state.x;
  Vec v = state.v;
  advance(x, v, buffer, model, quad, dt, total, info.memory_warning);
  bool ok = !too_close(model, x);

  std::vector<Vec> increments{total};
  for (int level = 1; level <= kMaxGuardHalvings && !ok; ++level) {
    increments = refine_bridge(increments, dt / (1 << (level - 1)), rng);
    const double h = dt / static_cast<double>(increments.size());
    x = state.x;
    v = state.v;
    ok = true;
    for (const Vec& inc : increments) {
      if (!models::in_domain(model, x) && models::is_singular(model.singular)) {
        ok = false;
        break;
      }
      advance(x, v, buffer, model, quad, h, inc, info.memory_warning);
      if (too_close(model, x)) {
        ok = false;
      }
    }
    info.substeps = static_cast<int>(increments.size());
  }
  state.x = x;
  state.v = v;
  buffer.push(state.x);
  state.t += dt;
  info.near_singular = too_close(model, state.x);
  return info;
}

std::string_view to_string(TrajectoryEvent::Kind kind) {
  switch (kind) {
    case TrajectoryEvent::Kind::singularity_proximity:
      return "singularity_proximity";
    case TrajectoryEvent::Kind::memory_truncation:
      return "memory_truncation";
    case TrajectoryEvent::Kind::guarded_refinement:
      return "guarded_refinement";
  }
  return "unknown";
}

void check_config(const SimConfig& c) {
  models::check_model(c.model);
  const int d = c.model.dimension;
  if (!(c.dt > 0.0)) {
    throw ArgumentError("dt must be positive");
  }
  if (!(c.t_max > 0.0)) {
    throw ArgumentError("t_max must be positive");
  }
  if (!(c.burn_in >= 0.0) || !(c.burn_in < c.t_max)) {
    throw ArgumentError("burn_in must lie in [0, t_max)");
  }
  if (c.x0.size() != d || c.v0.size() != d || c.initial_past.size() != d) {
    throw ArgumentError("x0, v0 and initial_past must have the model dimension");
  }
  if (!c.x0.allFinite() || !c.v0.allFinite() || !c.initial_past.allFinite()) {
    throw ArgumentError("initial data must be finite");
  }
  if (!models::in_domain(c.model, c.x0)) {
    throw ArgumentError("initial position lies outside the admissible domain");
  }
  if (c.record_stride < 1) {
    throw ArgumentError("record_stride must be at least 1");
  }
  if (c.noise_refinement < 0 || c.noise_refinement > 16) {
    throw ArgumentError("noise_refinement must lie in [0, 16]");
  }
}

int memory_steps(const SimConfig& config) {
  return config.n_mem > 0 ? config.n_mem : state::default_memory_steps(config.model.kernel, config.dt);
}

long total_steps(const SimConfig& config) { return std::lround(config.t_max / config.dt); }

Trajectory simulate(const SimConfig& config, const Observer& observer, std::uint64_t member) {
  check_config(config);
  Trajectory traj;
  traj.dim = config.model.dimension;
  traj.dt = config.dt;
  traj.record_stride = config.record_stride;
  traj.stream = stream_key(config.seed, member);
  traj.min_radius = std::numeric_limits<double>::infinity();

  HistoryBuffer buffer = HistoryBuffer::constant_past(config.initial_past, config.dt, memory_steps(config));
  // eta(0; 0) = x0; the displaced constant sample equals the tail, so this is lossless
  buffer.push(config.x0);
  WalkerState state{config.x0, config.v0, 0.0};
  run(config, std::move(state), std::move(buffer), Rng(traj.stream), 0, true, observer, traj);
  return traj;
}

Trajectory resume(const SimConfig& config, const WalkerState& state, const HistoryBuffer& buffer,
                  const Rng::State& rng, long step, const Observer& observer) {
  check_config(config);
  if (buffer.dt() != config.dt || buffer.dim() != config.model.dimension) {
    throw ArgumentError("checkpoint buffer does not match the configuration");
  }
  Trajectory traj;
  traj.dim = config.model.dimension;
  traj.dt = config.dt;
  traj.record_stride = config.record_stride;
  traj.stream = rng.key;
  traj.min_radius = std::numeric_limits<double>::infinity();
  // the state at `step` was recorded by the run that wrote the checkpoint
  run(config, state, buffer, Rng(rng), step, false, observer, traj);
  return traj;
}

}  // namespace memwalk::integrator
