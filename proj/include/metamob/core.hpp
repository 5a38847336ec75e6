#pragma once

#include "metamob/types.hpp"

namespace metamob {

/// Manhattan distance between two grid-form ids.
/// Throws DataError naming the offending id when either id is not grid-form.
std::int64_t manhattan_distance(const LocationId& a, const LocationId& b);

/// Group an unordered event stream into per-agent trajectories. Events of
/// one agent are sorted by (t, input order); duplicate records are kept.
/// The returned map iterates agents lexicographically.
TrajectoryMap canonicalize_trajectories(const std::vector<MovementEvent>& events);

AgentStats agent_stats(const Trajectory& traj);

}  // namespace metamob
