#include "cdsim/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>

namespace cdsim {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Independent generator per (seed, purpose, index).
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    purpose, index};
  return std::mt19937_64(seq);
}

enum Purpose : std::uint32_t { kPlacement = 1, kEnergy = 2, kFlows = 3, kMobility = 4 };

}  // namespace

HelloProtocol::HelloProtocol(std::size_t n)
    : n1_(n, NodeSet(n)), n2_(n, NodeSet(n)), inbox_(n), sent_(n) {}

void HelloProtocol::round(const UdgSnapshot& current, std::span<const double> energy,
                          std::span<const double> speed, std::size_t hello_size,
                          std::size_t per_neighbor, EnergyLedger* ledger, double now) {
  const std::size_t n = current.size();
  if (n1_.size() != n) *this = HelloProtocol(n);

  std::vector<std::vector<HelloMessage>> inbox(n);
  for (std::size_t u = 0; u < n; ++u) {
    HelloMessage msg{current.id(u), energy[u], speed[u], current.ids_of(n1_[u])};
    const std::size_t bytes = hello_size + per_neighbor * msg.neighbors.size();
    if (ledger != nullptr) {
      const double airtime = ledger->airtime(bytes);
      ledger->charge(u, Activity::Tx, airtime, now);
      for (std::size_t v : current.neighbors(u)) ledger->charge(v, Activity::Rx, airtime, now);
    }
    for (std::size_t v : current.neighbors(u)) inbox[v].push_back(msg);
    sent_[u] = std::move(msg);
  }

  for (std::size_t v = 0; v < n; ++v) {
    NodeSet one(n);
    NodeSet two(n);
    for (const auto& msg : inbox[v]) {
      one.set(*current.index_of(msg.sender));
      for (NodeId id : msg.neighbors) two.set(*current.index_of(id));
    }
    two -= one;
    two.reset(v);
    n1_[v] = std::move(one);
    n2_[v] = std::move(two);
  }
  inbox_ = std::move(inbox);
  ++rounds_;
}

RouteDiscovery route_discovery(const UdgSnapshot& current, const NodeSet& black,
                               const RouteRequest& request, RouteMode mode, std::size_t ttl) {
  const auto src = current.index_of(request.source);
  const auto dst = current.index_of(request.destination);
  if (!src || !dst) throw Error("route_discovery: unknown source or destination");
  if (*src == *dst) throw Error("route_discovery: source equals destination");

  const std::size_t n = current.size();
  const bool use_black = mode == RouteMode::Cds && black.size() == n;
  std::vector<std::size_t> hops(n, kNone);
  std::vector<std::size_t> parent(n, kNone);
  RouteDiscovery out;
  out.request = request;

  std::deque<std::size_t> pending{*src};
  hops[*src] = 0;
  while (!pending.empty()) {
    const std::size_t x = pending.front();
    pending.pop_front();
    out.transmitters.push_back(x);
    for (std::size_t y : current.neighbors(x)) {
      if (hops[y] != kNone) continue;
      hops[y] = hops[x] + 1;
      parent[y] = x;
      // A Black destination answers instead of relaying; blind flooding has
      // every node rebroadcast once, destination included.
      const bool forwards =
          mode == RouteMode::Flooding || (use_black && black.test(y) && y != *dst);
      if (forwards && hops[y] < ttl) pending.push_back(y);
    }
  }

  if (hops[*dst] == kNone) return out;
  for (std::size_t at = *dst; at != kNone; at = parent[at]) out.path.push_back(at);
  std::reverse(out.path.begin(), out.path.end());
  out.request.hop_count = hops[*dst];
  out.request.reverse_path.clear();
  for (std::size_t i = 0; i + 1 < out.path.size(); ++i) {
    out.request.reverse_path.push_back(current.id(out.path[i]));
  }
  return out;
}

double MetricsRecord::pdr() const {
  return sent == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(sent);
}

bool Simulation::Event::operator>(const Event& other) const {
  if (time != other.time) return time > other.time;
  if (kind != other.kind) return kind > other.kind;
  return seq > other.seq;
}

Simulation::Simulation(const ScenarioConfig& config, const RunSpec& spec, std::ostream* trace)
    : config_(config), spec_(spec), trace_(trace) {
  config_.validate();
  if (spec.nodes == 0) throw Error("simulation needs at least one node");
  const std::size_t n = spec.nodes;

  const UdgSnapshot start =
      random_connected_udg(n, config_.area, config_.range, stream(spec.seed, kPlacement)());
  ids_ = start.ids();
  nodes_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) nodes_.push_back(initial_waypoint_state(start.position(i)));

  auto energy_rng = stream(spec.seed, kEnergy);
  std::uniform_real_distribution<double> energy(config_.energy_min, config_.energy_max);
  std::vector<double> initial(n);
  for (auto& e : initial) e = energy(energy_rng);
  ledger_ = EnergyLedger(std::move(initial), config_.power, config_.bitrate);

  if (n >= 2) {
    auto flow_rng = stream(spec.seed, kFlows);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<std::size_t> other(0, n - 2);
    for (std::size_t f = 0; f < config_.flows; ++f) {
      const std::size_t s = pick(flow_rng);
      std::size_t d = other(flow_rng);
      if (d >= s) ++d;
      flows_.push_back({s, d});
    }
  }
  init_common();
}

Simulation::Simulation(const ScenarioConfig& config, const RunSpec& spec,
                       std::span<const NodePlacement> placement,
                       std::vector<double> initial_energy, std::vector<Flow> flows,
                       std::ostream* trace)
    : config_(config), spec_(spec), trace_(trace), flows_(std::move(flows)) {
  config_.validate();
  const UdgSnapshot start = UdgSnapshot::build(placement, config_.range);
  const std::size_t n = start.size();
  if (initial_energy.size() != n) throw Error("simulation: one initial energy per node required");
  spec_.nodes = n;
  ids_ = start.ids();
  for (std::size_t i = 0; i < n; ++i) nodes_.push_back(initial_waypoint_state(start.position(i)));
  for (const auto& f : flows_) {
    if (f.source >= n || f.destination >= n || f.source == f.destination) {
      throw Error("simulation: invalid flow endpoints");
    }
  }
  ledger_ = EnergyLedger(std::move(initial_energy), config_.power, config_.bitrate);
  init_common();
}

void Simulation::init_common() {
  const std::size_t n = nodes_.size();
  mobility_ = {config_.area, spec_.v_max, config_.pause};
  rngs_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rngs_.push_back(stream(spec_.seed, kMobility, static_cast<std::uint32_t>(i)));
  }
  hello_ = HelloProtocol(n);
  routes_.assign(flows_.size(), {});
  broadcast_ids_.assign(n, 0);

  metrics_.algorithm = spec_.algorithm;
  metrics_.mode = spec_.mode;
  metrics_.nodes = n;
  metrics_.v_max = spec_.v_max;
  metrics_.seed = spec_.seed;

  schedule(config_.mobility_step, EventKind::Tick, 1);
  schedule(0.0, EventKind::Hello, 0);
  // Two hello rounds give every node its 2-hop view; construction and
  // traffic start only then.
  const double warmup = 2.0 * config_.hello_interval;
  schedule(warmup, EventKind::Recompute, 0);
  const double interval = 1.0 / config_.packet_rate;
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const double offset = interval * static_cast<double>(f) / static_cast<double>(flows_.size());
    schedule(warmup + offset, EventKind::Packet, f);
  }
}

void Simulation::schedule(double time, EventKind kind, std::size_t index) {
  queue_.push(Event{time, kind, next_seq_++, index});
}

const UdgSnapshot& Simulation::current_graph() {
  if (!current_) {
    std::vector<NodePlacement> placement(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) placement[i] = {ids_[i], nodes_[i].position};
    current_ = UdgSnapshot::build(placement, config_.range);
  }
  return *current_;
}

void Simulation::trace(const char* type, std::size_t node, const std::string& details) {
  if (trace_ == nullptr) return;
  char head[64];
  if (node == kNone) {
    std::snprintf(head, sizeof head, "%.6f %s -", now_, type);
  } else {
    std::snprintf(head, sizeof head, "%.6f %s %d", now_, type, ids_[node]);
  }
  *trace_ << head;
  if (!details.empty()) *trace_ << ' ' << details;
  *trace_ << '\n';
}

void Simulation::charge(std::size_t node, Activity activity, double duration) {
  if (auto death = ledger_.charge(node, activity, duration, now_)) {
    trace("death", node, "");
  }
}

void Simulation::broadcast_charge(std::size_t sender, std::size_t bytes) {
  const double airtime = ledger_.airtime(bytes);
  charge(sender, Activity::Tx, airtime);
  for (std::size_t v : current_graph().neighbors(sender)) charge(v, Activity::Rx, airtime);
}

void Simulation::advance(double dt) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    nodes_[i] = advance_position(nodes_[i], dt, mobility_, rngs_[i]);
  }
  current_.reset();
  for (std::size_t i = 0; i < nodes_.size(); ++i) charge(i, Activity::Idle, dt);
}

void Simulation::hello_round() {
  const std::size_t n = nodes_.size();
  hello_energy_.resize(n);
  hello_speed_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    hello_energy_[i] = ledger_.residual(i);
    hello_speed_[i] = current_speed(nodes_[i]);
  }
  const UdgSnapshot& g = current_graph();
  const bool had_death = ledger_.first_death().has_value();
  hello_.round(g, hello_energy_, hello_speed_, config_.hello_size, config_.hello_neighbor_size,
               &ledger_, now_);
  if (!had_death && ledger_.first_death()) trace("death", ledger_.first_death()->node, "");
  hello_graph_ = g;
  trace("hello", kNone, "round=" + std::to_string(hello_.rounds()));
}

bool Simulation::recompute_backbone() {
  if (!hello_graph_) return false;
  const UdgSnapshot& g = *hello_graph_;
  if (!g.connected()) {
    ++metrics_.backbone_failures;
    trace("backbone", kNone, "disconnected snapshot, keeping previous backbone");
    return false;
  }
  const auto attrs = make_attributes(g, hello_energy_, hello_speed_);
  BackboneResult result = construct_backbone(spec_.algorithm, g, neighbor_tables(g), attrs);
  result.timestamp = now_;
  ++metrics_.recomputations;
  metrics_.safety_restores += result.safety_restores;
  cds_size_sum_ += static_cast<double>(result.size());
  trace("backbone", kNone, "size=" + std::to_string(result.size()));

  if (spec_.mode == RouteMode::Cds) {
    const NodeSet black = result.black();
    for (auto& path : routes_) {
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        if (!black.test(path[i])) {
          path.clear();
          break;
        }
      }
    }
  }
  backbone_ = std::move(result);
  return true;
}

RouteDiscovery Simulation::discover_route(std::size_t source, std::size_t destination) {
  const UdgSnapshot& g = current_graph();
  RouteRequest request;
  request.source = ids_[source];
  request.destination = ids_[destination];
  request.broadcast_id = ++broadcast_ids_[source];
  const NodeSet black = backbone_ ? backbone_->black() : g.empty_set();
  RouteDiscovery found = route_discovery(g, black, request, spec_.mode, g.size());

  for (std::size_t tx : found.transmitters) broadcast_charge(tx, config_.control_size);
  if (found.found()) {
    const double airtime = ledger_.airtime(config_.control_size);
    for (std::size_t i = found.path.size() - 1; i > 0; --i) {
      charge(found.path[i], Activity::Tx, airtime);
      charge(found.path[i - 1], Activity::Rx, airtime);
    }
  }
  ++metrics_.discoveries;
  if (!found.found()) ++metrics_.failed_discoveries;
  metrics_.rreq_total += found.transmissions();
  trace("rreq", source,
        "dst=" + std::to_string(ids_[destination]) + " id=" + std::to_string(request.broadcast_id) +
            " tx=" + std::to_string(found.transmissions()) +
            " hops=" + std::to_string(found.hop_count()));
  return found;
}

bool Simulation::send_packet(std::size_t flow) {
  const Flow& f = flows_[flow];
  ++metrics_.sent;
  auto& path = routes_[flow];
  if (path.empty()) {
    RouteDiscovery found = discover_route(f.source, f.destination);
    if (!found.found()) {
      trace("drop", f.source, "flow=" + std::to_string(flow) + " reason=no-route");
      return false;
    }
    path = std::move(found.path);
  }

  const double airtime = ledger_.airtime(config_.packet_size);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const std::size_t a = path[i];
    const std::size_t b = path[i + 1];
    charge(a, Activity::Tx, airtime);
    if (!(distance(nodes_[a].position, nodes_[b].position) < config_.range)) {
      trace("drop", a, "flow=" + std::to_string(flow) + " reason=link-broken");
      path.clear();
      return false;
    }
    charge(b, Activity::Rx, airtime);
  }
  ++metrics_.delivered;
  trace("deliver", f.destination, "flow=" + std::to_string(flow));
  return true;
}

MetricsRecord Simulation::run() {
  const double step = config_.mobility_step;
  const double interval = 1.0 / config_.packet_rate;
  const double warmup = 2.0 * config_.hello_interval;

  while (!stopped_ && !queue_.empty()) {
    const Event ev = queue_.top();
    if (!(ev.time < config_.duration)) break;
    queue_.pop();
    now_ = ev.time;
    switch (ev.kind) {
      case EventKind::Tick:
        advance(step);
        schedule(step * static_cast<double>(ev.index + 1), EventKind::Tick, ev.index + 1);
        break;
      case EventKind::Hello:
        hello_round();
        schedule(config_.hello_interval * static_cast<double>(ev.index + 1), EventKind::Hello,
                 ev.index + 1);
        break;
      case EventKind::Recompute:
        recompute_backbone();
        schedule(warmup + config_.recompute_interval * static_cast<double>(ev.index + 1),
                 EventKind::Recompute, ev.index + 1);
        break;
      case EventKind::Packet: {
        send_packet(ev.index);
        // Packet k of a flow is due at warmup + offset + k * interval; the
        // offset is recovered from the first due time.
        const std::size_t f = ev.index;
        const double offset =
            interval * static_cast<double>(f) / static_cast<double>(flows_.size());
        const double k = std::round((ev.time - warmup - offset) / interval) + 1.0;
        schedule(warmup + offset + k * interval, EventKind::Packet, f);
        break;
      }
    }
    if (ledger_.first_death()) stopped_ = true;
  }

  metrics_.lifetime = ledger_.first_death() ? ledger_.first_death()->time : config_.duration;
  metrics_.cds_size_mean =
      metrics_.recomputations == 0 ? 0.0 : cds_size_sum_ / static_cast<double>(metrics_.recomputations);
  return metrics_;
}

MetricsRecord run_simulation(const ScenarioConfig& config, const RunSpec& spec,
                             std::ostream* trace) {
  config.validate();
  try {
    Simulation sim(config, spec, trace);
    return sim.run();
  } catch (const Error& e) {
    MetricsRecord failed;
    failed.algorithm = spec.algorithm;
    failed.mode = spec.mode;
    failed.nodes = spec.nodes;
    failed.v_max = spec.v_max;
    failed.seed = spec.seed;
    failed.failed = true;
    failed.error = e.what();
    return failed;
  }
}

}  // namespace cdsim
