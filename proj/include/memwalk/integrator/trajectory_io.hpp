#pragma once

#include "memwalk/integrator/stepper.hpp"

#include <iosfwd>
#include <string>

namespace memwalk::integrator {

/// Shortest "%.17g" rendering; round-trips every double.
std::string format_number(double value);

/// Header `t,x1,...,xd,v1,...,vd`, one row per recorded state, '\n' line endings.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Reads times and states written by write_trajectory_csv. Lines starting with '#' are skipped.
Trajectory read_trajectory_csv(std::istream& in);

struct Checkpoint {
  long step = 0;
  WalkerState state;
  HistoryBuffer buffer;
  Rng::State rng;
};

/// Trajectory CSV followed by '#'-prefixed lines with the final state, generator state and
/// serialized history buffer.
void write_checkpoint(std::ostream& out, const Trajectory& traj);

/// Parses the trailer of a checkpoint file; throws ArgumentError when it is missing or malformed.
Checkpoint read_checkpoint(std::istream& in);

}  // namespace memwalk::integrator
