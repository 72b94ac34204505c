#include "cdsim/mobility.hpp"

#include <algorithm>

namespace cdsim {

WaypointState initial_waypoint_state(Point position) {
  WaypointState s;
  s.position = position;
  s.destination = position;
  return s;
}

WaypointState advance_position(const WaypointState& state, double dt, const MobilityParams& params,
                               std::mt19937_64& rng) {
  if (dt < 0.0) throw Error("advance_position: negative time step");
  WaypointState s = state;
  double left = dt;
  // Each pass either finishes the step or crosses one leg/pause boundary.
  while (true) {
    if (!s.moving) {
      if (s.pause_remaining > left) {
        s.pause_remaining -= left;
        return s;
      }
      left -= s.pause_remaining;
      s.pause_remaining = 0.0;
      std::uniform_real_distribution<double> xs(0.0, params.area.width);
      std::uniform_real_distribution<double> ys(0.0, params.area.height);
      std::uniform_real_distribution<double> speeds(0.0, params.v_max);
      s.destination = {xs(rng), ys(rng)};
      s.speed = speeds(rng);
      s.moving = true;
    }
    if (s.speed <= 0.0) return s;

    const double remaining = distance(s.position, s.destination);
    const double travel = s.speed * left;
    if (travel < remaining) {
      const double f = travel / remaining;
      s.position.x += (s.destination.x - s.position.x) * f;
      s.position.y += (s.destination.y - s.position.y) * f;
      s.position.x = std::clamp(s.position.x, 0.0, params.area.width);
      s.position.y = std::clamp(s.position.y, 0.0, params.area.height);
      return s;
    }
    left -= remaining / s.speed;
    s.position = s.destination;
    s.moving = false;
    s.pause_remaining = params.pause;
    if (left <= 0.0) return s;
  }
}

double current_speed(const WaypointState& state) { return state.moving ? state.speed : 0.0; }

}  // namespace cdsim
