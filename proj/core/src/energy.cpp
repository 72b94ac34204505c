#include "cdsim/energy.hpp"

#include <string>

namespace cdsim {

double PowerRatings::rating(Activity activity) const {
  switch (activity) {
    case Activity::Tx:
      return tx_w;
    case Activity::Rx:
      return rx_w;
    case Activity::Idle:
      return idle_w;
  }
  throw Error("unknown radio activity " + std::to_string(static_cast<int>(activity)));
}

double packet_airtime(std::size_t bytes, double bitrate_bps) {
  if (bytes == 0) throw Error("packet_airtime: packet must carry at least one byte");
  if (!(bitrate_bps > 0.0)) throw Error("packet_airtime: bitrate must be positive");
  return static_cast<double>(bytes) * 8.0 / bitrate_bps;
}

EnergyLedger::EnergyLedger(std::vector<double> initial, PowerRatings ratings, double bitrate_bps)
    : initial_(std::move(initial)),
      residual_(initial_),
      demanded_(initial_.size(), 0.0),
      death_time_(initial_.size()),
      ratings_(ratings),
      bitrate_(bitrate_bps) {
  for (double e : initial_) {
    if (!(e >= 0.0)) throw Error("EnergyLedger: initial energy must be non-negative");
  }
  if (!(bitrate_bps > 0.0)) throw Error("EnergyLedger: bitrate must be positive");
}

std::optional<DeathEvent> EnergyLedger::charge(std::size_t node, Activity activity,
                                               double duration, double now) {
  if (duration < 0.0) throw Error("EnergyLedger::charge: negative duration");
  const double joules = ratings_.rating(activity) * duration;
  ++counts_[static_cast<std::size_t>(activity)];
  demanded_[node] += joules;
  if (death_time_[node]) return std::nullopt;

  residual_[node] -= joules;
  if (residual_[node] > 0.0) return std::nullopt;
  residual_[node] = 0.0;
  death_time_[node] = now;
  DeathEvent event{node, now};
  if (!first_death_) first_death_ = event;
  return event;
}

}  // namespace cdsim
