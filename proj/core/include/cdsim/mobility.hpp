#pragma once

#include <random>

#include "cdsim/netgraph.hpp"

namespace cdsim {

struct MobilityParams {
  Area area;
  double v_max = 5.0;   // m/s
  double pause = 100.0; // s, spent at every reached waypoint
};

/// Random-waypoint motion state of one node.
struct WaypointState {
  Point position;
  Point destination;
  double speed = 0.0;            // speed of the current leg
  double pause_remaining = 0.0;  // s
  bool moving = false;
};

/// A node parked at `position` that draws its first leg on the next advance.
WaypointState initial_waypoint_state(Point position);

/// Advances the node by `dt` seconds. A reached waypoint starts a pause; once
/// the pause runs out a new uniform waypoint and a uniform speed in
/// [0, v_max] are drawn from `rng`. Throws Error for negative dt.
WaypointState advance_position(const WaypointState& state, double dt, const MobilityParams& params,
                               std::mt19937_64& rng);

/// 0 while paused or before the first leg, otherwise the leg speed.
double current_speed(const WaypointState& state);

}  // namespace cdsim
