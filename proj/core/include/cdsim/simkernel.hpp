#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cdsim/backbone.hpp"
#include "cdsim/config.hpp"
#include "cdsim/energy.hpp"
#include "cdsim/mobility.hpp"
#include "cdsim/netgraph.hpp"

namespace cdsim {

struct HelloMessage {
  NodeId sender = 0;
  double energy = 0.0;
  double speed = 0.0;
  std::vector<NodeId> neighbors;
};

/// What each node has learned from hello exchanges. A node's advertised
/// neighbor list lags one round behind, so 2-hop knowledge is complete only
/// after two rounds on a static topology.
class HelloProtocol {
 public:
  explicit HelloProtocol(std::size_t n = 0);

  /// Every node broadcasts once over `current`. `energy` and `speed` are the
  /// values each sender advertises. Charges TX/RX on `ledger` when given.
  void round(const UdgSnapshot& current, std::span<const double> energy,
             std::span<const double> speed, std::size_t hello_size, std::size_t per_neighbor,
             EnergyLedger* ledger, double now);

  std::size_t rounds() const { return rounds_; }
  const NodeSet& n1(std::size_t node) const { return n1_[node]; }
  const NodeSet& n2(std::size_t node) const { return n2_[node]; }
  /// Messages `node` heard in the latest round, in sender order.
  const std::vector<HelloMessage>& inbox(std::size_t node) const { return inbox_[node]; }
  /// What `node` itself advertised in the latest round.
  const HelloMessage& sent(std::size_t node) const { return sent_[node]; }

 private:
  std::size_t rounds_ = 0;
  std::vector<NodeSet> n1_;
  std::vector<NodeSet> n2_;
  std::vector<std::vector<HelloMessage>> inbox_;
  std::vector<HelloMessage> sent_;
};

struct RouteRequest {
  NodeId source = 0;
  NodeId destination = 0;
  std::uint64_t broadcast_id = 0;
  std::size_t hop_count = 0;
  std::vector<NodeId> reverse_path;
};

struct RouteDiscovery {
  /// The request as it first reached the destination (hop count and reverse
  /// path filled in); only meaningful when found().
  RouteRequest request;
  /// Source first, destination last; empty when the destination was not reached.
  std::vector<std::size_t> path;
  /// Nodes that transmitted the request, in transmission order.
  std::vector<std::size_t> transmitters;

  bool found() const { return !path.empty(); }
  std::size_t transmissions() const { return transmitters.size(); }
  std::size_t hop_count() const { return path.empty() ? 0 : path.size() - 1; }
};

/// Floods one route request over `current`. The source always transmits;
/// any other node rebroadcasts once if it is a forwarder (every node in
/// flooding mode, Black nodes in CDS mode) and its hop count is below `ttl`.
/// The reverse path follows first receptions in breadth-first order.
/// Throws Error when source and destination coincide or are unknown.
RouteDiscovery route_discovery(const UdgSnapshot& current, const NodeSet& black,
                               const RouteRequest& request, RouteMode mode, std::size_t ttl);

struct RunSpec {
  std::size_t nodes = 100;
  double v_max = 5.0;
  Algorithm algorithm = Algorithm::EasCds;
  RouteMode mode = RouteMode::Cds;
  std::uint64_t seed = 1;
};

struct MetricsRecord {
  Algorithm algorithm = Algorithm::EasCds;
  RouteMode mode = RouteMode::Cds;
  std::size_t nodes = 0;
  double v_max = 0.0;
  std::uint64_t seed = 0;
  double cds_size_mean = 0.0;
  double lifetime = 0.0;
  std::size_t rreq_total = 0;
  std::size_t sent = 0;
  std::size_t delivered = 0;

  std::size_t recomputations = 0;
  std::size_t backbone_failures = 0;
  std::size_t safety_restores = 0;
  std::size_t discoveries = 0;
  std::size_t failed_discoveries = 0;

  bool failed = false;
  std::string error;

  /// delivered / sent, or 0 when nothing was sent.
  double pdr() const;
};

struct Flow {
  std::size_t source = 0;
  std::size_t destination = 0;
};

/// One seeded run: random-waypoint nodes, periodic hellos and backbone
/// recomputation, CBR flows with on-demand route discovery. Stops at the
/// first node death or at the configured duration.
class Simulation {
 public:
  Simulation(const ScenarioConfig& config, const RunSpec& spec, std::ostream* trace = nullptr);

  /// Fixed placement and batteries, primarily for tests. Node ids become
  /// indices in id order.
  Simulation(const ScenarioConfig& config, const RunSpec& spec,
             std::span<const NodePlacement> placement, std::vector<double> initial_energy,
             std::vector<Flow> flows, std::ostream* trace = nullptr);

  MetricsRecord run();

  // Single steps, exposed for tests.
  void hello_round();
  /// Returns false when the hello snapshot was disconnected and the previous
  /// backbone was kept.
  bool recompute_backbone();
  RouteDiscovery discover_route(std::size_t source, std::size_t destination);
  /// Sends one packet of `flow`; true when it was delivered.
  bool send_packet(std::size_t flow);
  void advance(double dt);

  double now() const { return now_; }
  std::size_t size() const { return nodes_.size(); }
  const EnergyLedger& ledger() const { return ledger_; }
  const HelloProtocol& hello() const { return hello_; }
  const std::optional<BackboneResult>& backbone() const { return backbone_; }
  const std::vector<Flow>& flows() const { return flows_; }
  const std::vector<std::size_t>& route(std::size_t flow) const { return routes_[flow]; }
  const UdgSnapshot& current_graph();
  Point position(std::size_t node) const { return nodes_[node].position; }
  double speed(std::size_t node) const { return current_speed(nodes_[node]); }
  const MetricsRecord& metrics() const { return metrics_; }

 private:
  enum class EventKind : std::uint8_t { Tick, Hello, Recompute, Packet };
  struct Event {
    double time;
    EventKind kind;
    std::uint64_t seq;
    std::size_t index;  // tick/round number or flow

    bool operator>(const Event& other) const;
  };

  void init_common();
  void schedule(double time, EventKind kind, std::size_t index);
  void charge(std::size_t node, Activity activity, double duration);
  void broadcast_charge(std::size_t sender, std::size_t bytes);
  void trace(const char* type, std::size_t node, const std::string& details);

  ScenarioConfig config_;
  RunSpec spec_;
  std::ostream* trace_ = nullptr;

  std::vector<NodeId> ids_;
  std::vector<WaypointState> nodes_;
  std::vector<std::mt19937_64> rngs_;
  MobilityParams mobility_;
  EnergyLedger ledger_;
  HelloProtocol hello_;
  std::optional<UdgSnapshot> hello_graph_;
  std::vector<double> hello_energy_;
  std::vector<double> hello_speed_;
  std::optional<BackboneResult> backbone_;
  std::optional<UdgSnapshot> current_;
  std::vector<Flow> flows_;
  std::vector<std::vector<std::size_t>> routes_;
  std::vector<std::uint64_t> broadcast_ids_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  double cds_size_sum_ = 0.0;
  bool stopped_ = false;
  MetricsRecord metrics_;
};

/// Builds and runs one simulation. Never throws for run-time failures: they
/// come back as a record with `failed` set. Invalid configs throw Error.
MetricsRecord run_simulation(const ScenarioConfig& config, const RunSpec& spec,
                             std::ostream* trace = nullptr);

}  // namespace cdsim
