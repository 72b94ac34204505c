#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "cdsim/simkernel.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cdsim;
using namespace cdsim::testing;

namespace {

RouteRequest request(NodeId source, NodeId destination) {
  RouteRequest r;
  r.source = source;
  r.destination = destination;
  r.broadcast_id = 1;
  return r;
}

ScenarioConfig short_config(double duration) {
  ScenarioConfig c;
  c.duration = duration;
  return c;
}

RunSpec static_spec(RouteMode mode = RouteMode::Cds, Algorithm a = Algorithm::EasCds) {
  RunSpec s;
  s.v_max = 0.0;
  s.mode = mode;
  s.algorithm = a;
  return s;
}

std::vector<NodePlacement> path_placement(std::size_t n, double spacing = 200.0) {
  std::vector<NodePlacement> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({static_cast<NodeId>(i), {50.0 + spacing * static_cast<double>(i), 500.0}});
  return p;
}

}  // namespace

TEST_CASE("hello rounds learn two hops after two rounds") {
  const auto g = path_graph(3);
  const std::vector<double> energy = {1, 2, 3};
  const std::vector<double> speed = {0, 0, 0};
  HelloProtocol hello(3);
  hello.round(g, energy, speed, 64, 4, nullptr, 0.0);
  CHECK(ids(g, hello.n1(0)) == std::vector<NodeId>{2});
  CHECK(hello.n2(0).none());
  hello.round(g, energy, speed, 64, 4, nullptr, 1.0);
  CHECK(ids(g, hello.n2(0)) == std::vector<NodeId>{3});
  CHECK(hello.rounds() == 2);
  CHECK(hello.sent(1).neighbors == std::vector<NodeId>{1, 3});
  CHECK(hello.sent(1).energy == 2.0);
  REQUIRE(hello.inbox(1).size() == 2);
  CHECK(hello.inbox(1)[0].sender == 1);
}

TEST_CASE("hello charges") {
  SUBCASE("one round on a static graph") {
    std::mt19937_64 rng(1);
    const auto g = random_graph(rng, 10);
    const std::vector<double> zero(10, 0.0);
    EnergyLedger ledger(std::vector<double>(10, 10.0), PowerRatings{}, 2e6);
    HelloProtocol hello(10);
    hello.round(g, zero, zero, 64, 4, &ledger, 0.0);
    std::size_t degree_sum = 0;
    for (std::size_t i = 0; i < 10; ++i) degree_sum += g.degree(i);
    CHECK(ledger.charge_count(Activity::Tx) == 10);
    CHECK(ledger.charge_count(Activity::Rx) == degree_sum);
  }
  SUBCASE("isolated node") {
    const std::vector<NodePlacement> p = {{5, {0, 0}}};
    const auto g = UdgSnapshot::build(p, 250);
    const std::vector<double> zero(1, 0.0);
    EnergyLedger ledger({1.0}, PowerRatings{}, 2e6);
    HelloProtocol hello(1);
    hello.round(g, zero, zero, 64, 4, &ledger, 0.0);
    hello.round(g, zero, zero, 64, 4, &ledger, 1.0);
    CHECK(hello.n1(0).none());
    CHECK(hello.n2(0).none());
    CHECK(ledger.charge_count(Activity::Rx) == 0);
  }
  SUBCASE("message size grows with the advertised list") {
    const auto g = path_graph(2);
    const std::vector<double> zero(2, 0.0);
    EnergyLedger ledger({1.0, 1.0}, PowerRatings{}, 2e6);
    HelloProtocol hello(2);
    hello.round(g, zero, zero, 64, 4, &ledger, 0.0);
    const double first = 1.0 - ledger.residual(0);
    hello.round(g, zero, zero, 64, 4, &ledger, 1.0);
    const double second = 1.0 - ledger.residual(0) - first;
    // TX + RX of a 64 B hello, then of a 68 B one.
    CHECK(first == doctest::Approx(2.4 * 64 * 8 / 2e6));
    CHECK(second == doctest::Approx(2.4 * 68 * 8 / 2e6));
  }
}

TEST_CASE("route discovery on a path") {
  const auto g = path_graph(3);
  const NodeSet black = set_of(g, {2});
  const auto cds = route_discovery(g, black, request(1, 3), RouteMode::Cds, 3);
  CHECK(cds.transmissions() == 2);
  CHECK(cds.found());
  CHECK(cds.path == std::vector<std::size_t>{0, 1, 2});
  CHECK(cds.request.hop_count == 2);
  CHECK(cds.request.reverse_path == std::vector<NodeId>{1, 2});
  const auto flood = route_discovery(g, black, request(1, 3), RouteMode::Flooding, 3);
  CHECK(flood.transmissions() == 3);
  CHECK(flood.found());

  const auto adjacent = route_discovery(g, black, request(1, 2), RouteMode::Cds, 3);
  CHECK(adjacent.transmissions() == 1);
  CHECK(adjacent.hop_count() == 1);

  CHECK_THROWS_AS(route_discovery(g, black, request(2, 2), RouteMode::Cds, 3), Error);
  CHECK_THROWS_AS(route_discovery(g, black, request(1, 9), RouteMode::Cds, 3), Error);
}

TEST_CASE("route discovery limits") {
  const auto g = path_graph(5);
  SUBCASE("ttl") {
    CHECK_FALSE(route_discovery(g, g.empty_set(), request(1, 5), RouteMode::Flooding, 3).found());
    CHECK(route_discovery(g, g.empty_set(), request(1, 5), RouteMode::Flooding, 4).found());
  }
  SUBCASE("no Black relays") {
    const auto r = route_discovery(g, g.empty_set(), request(1, 5), RouteMode::Cds, 5);
    CHECK_FALSE(r.found());
    CHECK(r.transmissions() == 1);
    CHECK(r.hop_count() == 0);
  }
}

TEST_CASE("worked example: CDS discovery stays on the backbone") {
  const auto p = worked_example_placement();
  const auto g = UdgSnapshot::build(p, 250);
  const NodeSet black = set_of(g, {2, 7, 9, 10});
  for (NodeId s = 1; s <= 10; ++s) {
    for (NodeId d = 1; d <= 10; ++d) {
      if (s == d) continue;
      const auto cds = route_discovery(g, black, request(s, d), RouteMode::Cds, 10);
      const auto flood = route_discovery(g, black, request(s, d), RouteMode::Flooding, 10);
      CHECK(cds.found());
      CHECK(cds.transmissions() <= 5);
      CHECK(flood.transmissions() == 10);
    }
  }
}

TEST_CASE("discovery invariants on random backbones (property)") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> size(2, 80);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_graph(rng, size(rng));
    const auto t = neighbor_tables(g);
    const auto attrs = random_attributes(g, rng);
    const auto black = eas_cds(g, t, attrs).black();
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    for (int q = 0; q < 10; ++q) {
      const auto s = pick(rng);
      auto d = pick(rng);
      if (s == d) continue;
      for (auto mode : {RouteMode::Cds, RouteMode::Flooding}) {
        const auto r = route_discovery(g, black, request(g.id(s), g.id(d)), mode, g.size());
        CHECK(r.found());
        const std::set<std::size_t> unique(r.transmitters.begin(), r.transmitters.end());
        CHECK(unique.size() == r.transmitters.size());
        CHECK(r.request.hop_count == r.request.reverse_path.size());
        CHECK(r.path.front() == s);
        CHECK(r.path.back() == d);
        const std::set<std::size_t> on_path(r.path.begin(), r.path.end());
        CHECK(on_path.size() == r.path.size());
        for (std::size_t i = 0; i + 1 < r.path.size(); ++i) CHECK(g.adjacent(r.path[i], r.path[i + 1]));
        if (mode == RouteMode::Cds) {
          CHECK(r.transmissions() <= 1 + black.count());
          for (std::size_t i = 1; i + 1 < r.path.size(); ++i) CHECK(black.test(r.path[i]));
        } else {
          CHECK(r.transmissions() <= g.size());
        }
      }
    }
  }
}

TEST_CASE("zero duration run") {
  const auto record = run_simulation(short_config(0.0), RunSpec{20, 5.0, Algorithm::EasCds, RouteMode::Cds, 3});
  CHECK_FALSE(record.failed);
  CHECK(record.sent == 0);
  CHECK(record.rreq_total == 0);
  CHECK(record.lifetime == 0.0);
  CHECK(record.pdr() == 0.0);
}

TEST_CASE("invalid config throws") {
  ScenarioConfig c;
  c.range = -1.0;
  CHECK_THROWS_AS(run_simulation(c, RunSpec{}), Error);
}

TEST_CASE("static connected network delivers everything") {
  auto c = short_config(30.0);
  const auto p = path_placement(4);
  Simulation sim(c, static_spec(), p, std::vector<double>(4, 1000.0), {{0, 3}});
  const auto m = sim.run();
  CHECK(m.sent > 0);
  CHECK(m.delivered == m.sent);
  CHECK(m.pdr() == 1.0);
  CHECK(m.lifetime == 30.0);
  CHECK(m.discoveries == 1);
  CHECK(m.cds_size_mean == doctest::Approx(2.0));
  CHECK(m.backbone_failures == 0);
  // Traffic starts after the second hello round: 28 s at 5 packets/s.
  CHECK(m.sent == 140);
}

TEST_CASE("static network: recomputations agree") {
  auto c = short_config(0.0);
  const auto p = path_placement(5);
  Simulation sim(c, static_spec(), p, std::vector<double>(5, 1000.0), {});
  sim.hello_round();
  sim.hello_round();
  REQUIRE(sim.recompute_backbone());
  const auto first = sim.backbone()->coloring;
  sim.hello_round();
  REQUIRE(sim.recompute_backbone());
  CHECK(sim.backbone()->coloring == first);
  CHECK(ids(sim.current_graph(), sim.backbone()->black()) == std::vector<NodeId>{1, 2, 3});
}

TEST_CASE("unreachable destination delivers nothing") {
  auto c = short_config(10.0);
  std::vector<NodePlacement> p = {{0, {0, 0}}, {1, {200, 0}}, {2, {900, 900}}};
  Simulation sim(c, static_spec(RouteMode::Flooding), p, std::vector<double>(3, 1000.0), {{0, 2}});
  const auto m = sim.run();
  CHECK(m.sent > 0);
  CHECK(m.delivered == 0);
  CHECK(m.failed_discoveries == m.discoveries);
  // Disconnected snapshots keep the (absent) previous backbone.
  CHECK(m.recomputations == 0);
  CHECK(m.backbone_failures > 0);
  CHECK_FALSE(sim.backbone().has_value());
}

TEST_CASE("disconnected snapshot keeps the previous backbone") {
  ScenarioConfig c = short_config(0.0);
  c.pause = 0.0;
  RunSpec spec = static_spec();
  spec.v_max = 25.0;
  Simulation sim(c, spec, path_placement(3, 240.0), std::vector<double>(3, 1000.0), {});
  sim.hello_round();
  sim.hello_round();
  REQUIRE(sim.recompute_backbone());
  const auto kept = sim.backbone()->coloring;
  for (int i = 0; i < 2000 && sim.current_graph().connected(); ++i) sim.advance(0.1);
  REQUIRE_FALSE(sim.current_graph().connected());
  sim.hello_round();
  CHECK_FALSE(sim.recompute_backbone());
  CHECK(sim.metrics().backbone_failures == 1);
  CHECK(sim.metrics().recomputations == 1);
  CHECK(sim.backbone()->coloring == kept);
}

TEST_CASE("broken hop invalidates the route") {
  ScenarioConfig c = short_config(0.0);
  c.pause = 0.0;
  RunSpec spec = static_spec(RouteMode::Flooding);
  spec.v_max = 25.0;
  const auto p = path_placement(3, 240.0);
  Simulation sim(c, spec, p, std::vector<double>(3, 1000.0), {{0, 2}});
  REQUIRE(sim.send_packet(0));
  CHECK(sim.route(0) == std::vector<std::size_t>{0, 1, 2});
  // Let the nodes wander until the cached path breaks.
  bool broke = false;
  for (int i = 0; i < 2000 && !broke; ++i) {
    sim.advance(0.1);
    const auto& g = sim.current_graph();
    if (!g.adjacent(0, 1) || !g.adjacent(1, 2)) broke = true;
  }
  REQUIRE(broke);
  CHECK_FALSE(sim.send_packet(0));
  CHECK(sim.route(0).empty());
}

TEST_CASE("runs are deterministic") {
  auto c = short_config(40.0);
  const RunSpec spec{40, 15.0, Algorithm::EasCds, RouteMode::Cds, 9};
  std::ostringstream a, b;
  const auto ra = run_simulation(c, spec, &a);
  const auto rb = run_simulation(c, spec, &b);
  CHECK(a.str() == b.str());
  CHECK(ra.lifetime == rb.lifetime);
  CHECK(ra.cds_size_mean == rb.cds_size_mean);
  CHECK(ra.rreq_total == rb.rreq_total);
  CHECK(ra.sent == rb.sent);
  CHECK(ra.delivered == rb.delivered);
  CHECK_FALSE(a.str().empty());
}

TEST_CASE("trace lines: time type node details") {
  auto c = short_config(5.0);
  std::ostringstream out;
  run_simulation(c, RunSpec{15, 5.0, Algorithm::WuEmpr, RouteMode::Cds, 2}, &out);
  std::istringstream lines(out.str());
  std::string line;
  std::set<std::string> types;
  double last = 0.0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    double t = -1.0;
    std::string type, node;
    REQUIRE(static_cast<bool>(fields >> t >> type >> node));
    CHECK(t >= last);
    last = t;
    types.insert(type);
  }
  CHECK(types.count("hello") == 1);
  CHECK(types.count("backbone") == 1);
  CHECK(types.count("rreq") == 1);
}

TEST_CASE("simulated runs respect their invariants (property)") {
  const ScenarioConfig c = short_config(60.0);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (auto a : kAllAlgorithms) {
      for (auto mode : {RouteMode::Cds, RouteMode::Flooding}) {
        const auto m = run_simulation(c, RunSpec{30, 10.0, a, mode, seed});
        CHECK_FALSE(m.failed);
        CHECK(m.lifetime <= c.duration);
        CHECK(m.lifetime >= 0.0);
        CHECK(m.delivered <= m.sent);
        CHECK(m.pdr() >= 0.0);
        CHECK(m.pdr() <= 1.0);
        CHECK(m.safety_restores == 0);
        CHECK(m.failed_discoveries <= m.discoveries);
      }
    }
  }
}

TEST_CASE("delivered packets ride on Black relays") {
  auto c = short_config(0.0);
  std::mt19937_64 rng(41);
  const auto g = random_graph(rng, 40);
  std::vector<Flow> flows;
  for (std::size_t i = 0; i < 10; ++i) flows.push_back({i, 39 - i});
  Simulation sim(c, static_spec(), g.placements(), std::vector<double>(40, 1000.0), flows);
  sim.hello_round();
  sim.hello_round();
  REQUIRE(sim.recompute_backbone());
  const NodeSet black = sim.backbone()->black();
  for (std::size_t f = 0; f < flows.size(); ++f) {
    REQUIRE(sim.send_packet(f));
    const auto& path = sim.route(f);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) CHECK(black.test(path[i]));
  }
}

TEST_CASE("a node dying ends the run") {
  auto c = short_config(600.0);
  const auto p = path_placement(3);
  Simulation sim(c, static_spec(), p, {1000.0, 0.05, 1000.0}, {{0, 2}});
  const auto m = sim.run();
  CHECK(m.lifetime < 600.0);
  CHECK(sim.ledger().first_death()->node == 1);
  CHECK(m.lifetime == sim.ledger().first_death()->time);
}
