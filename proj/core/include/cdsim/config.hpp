#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cdsim/backbone.hpp"
#include "cdsim/energy.hpp"
#include "cdsim/netgraph.hpp"

namespace cdsim {

/// How route requests propagate: only through Black nodes, or by blind flooding.
enum class RouteMode : std::uint8_t { Cds, Flooding };

std::string_view to_string(RouteMode mode);
/// Accepts `cds` or `flooding`; throws Error otherwise.
RouteMode parse_route_mode(std::string_view text);

/// Everything a scenario matrix needs. Defaults reproduce the reference
/// setup: 1000 m x 1000 m, 250 m range, 100 s pauses, 1-15 J batteries,
/// 1.4/1.0/0.013 W radio, 600 s, 20 CBR flows of 512 B at 5 packets/s.
struct ScenarioConfig {
  Area area{1000.0, 1000.0};
  std::vector<std::size_t> node_counts{50, 100, 150, 200, 250};
  double range = 250.0;
  std::vector<double> v_max{5.0, 15.0, 25.0};
  double pause = 100.0;
  double energy_min = 1.0;
  double energy_max = 15.0;
  PowerRatings power;
  double bitrate = 2e6;
  double duration = 600.0;
  double hello_interval = 1.0;
  double recompute_interval = 5.0;
  double mobility_step = 0.1;
  std::size_t flows = 20;
  double packet_rate = 5.0;
  std::size_t packet_size = 512;
  std::size_t hello_size = 64;
  std::size_t hello_neighbor_size = 4;
  std::size_t control_size = 48;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<Algorithm> algorithms{Algorithm::EasCds, Algorithm::WuEmpr, Algorithm::MinVelocity};
  std::vector<RouteMode> modes{RouteMode::Cds};

  /// Throws Error naming the first offending field.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Thrown by parse_config; carries the 1-based line number (0 when the
/// problem is not tied to one line).
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Line-oriented `key = value` text with `#` comments. Absent keys keep their
/// defaults; unknown keys, malformed lines and non-positive quantities throw
/// ConfigError.
ScenarioConfig parse_config(std::string_view text);

/// Every key spelled out, in the format parse_config reads.
std::string format_config(const ScenarioConfig& config);

}  // namespace cdsim
