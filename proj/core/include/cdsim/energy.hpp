#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cdsim/netgraph.hpp"

namespace cdsim {

enum class Activity : std::uint8_t { Tx, Rx, Idle };

struct PowerRatings {
  double tx_w = 1.4;
  double rx_w = 1.0;
  double idle_w = 0.013;

  /// Throws Error for an activity outside the enum.
  double rating(Activity activity) const;

  friend bool operator==(const PowerRatings&, const PowerRatings&) = default;
};

/// Seconds on air for `bytes` at `bitrate_bps`. Throws Error for zero bytes.
double packet_airtime(std::size_t bytes, double bitrate_bps);

struct DeathEvent {
  std::size_t node = 0;
  double time = 0.0;
};

/// Residual energy per node; charges are power × duration, clamped at zero.
class EnergyLedger {
 public:
  EnergyLedger() = default;
  EnergyLedger(std::vector<double> initial, PowerRatings ratings, double bitrate_bps);

  /// Drains `rating(activity) × duration` from `node`. Returns the death event
  /// the first time the node's residual is clamped to zero.
  std::optional<DeathEvent> charge(std::size_t node, Activity activity, double duration,
                                   double now);

  double airtime(std::size_t bytes) const { return packet_airtime(bytes, bitrate_); }

  std::size_t size() const { return residual_.size(); }
  double residual(std::size_t node) const { return residual_[node]; }
  const std::vector<double>& residuals() const { return residual_; }
  double initial(std::size_t node) const { return initial_[node]; }
  /// Sum of rating × duration requested so far, before clamping.
  double demanded(std::size_t node) const { return demanded_[node]; }
  bool alive(std::size_t node) const { return !death_time_[node].has_value(); }
  std::optional<double> death_time(std::size_t node) const { return death_time_[node]; }
  std::optional<DeathEvent> first_death() const { return first_death_; }

  std::size_t charge_count(Activity activity) const {
    return counts_[static_cast<std::size_t>(activity)];
  }
  const PowerRatings& ratings() const { return ratings_; }
  double bitrate() const { return bitrate_; }

 private:
  std::vector<double> initial_;
  std::vector<double> residual_;
  std::vector<double> demanded_;
  std::vector<std::optional<double>> death_time_;
  std::optional<DeathEvent> first_death_;
  std::array<std::size_t, 3> counts_{};
  PowerRatings ratings_;
  double bitrate_ = 2e6;
};

}  // namespace cdsim
