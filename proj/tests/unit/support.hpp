#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <vector>

#include "cdsim/backbone.hpp"
#include "cdsim/netgraph.hpp"

namespace cdsim::testing {

// Nodes 1..n on the x axis, `spacing` apart.
inline UdgSnapshot path_graph(std::size_t n, double spacing = 200.0, double range = 250.0) {
  std::vector<NodePlacement> p;
  for (std::size_t i = 0; i < n; ++i) {
    p.push_back({static_cast<NodeId>(i + 1), {spacing * static_cast<double>(i), 0.0}});
  }
  return UdgSnapshot::build(p, range);
}

// K4 with ids 1..4 on a 50 m square.
inline UdgSnapshot complete4() {
  const std::vector<NodePlacement> p = {{1, {0, 0}}, {2, {50, 0}}, {3, {0, 50}}, {4, {50, 50}}};
  return UdgSnapshot::build(p, 250.0);
}

inline NodeSet set_of(const UdgSnapshot& g, std::initializer_list<NodeId> ids) {
  const std::vector<NodeId> v(ids);
  return g.subset_of(v);
}

inline std::vector<NodeId> ids(const UdgSnapshot& g, const NodeSet& s) { return g.ids_of(s); }

// The ten-node worked example: R = 250 m, static nodes.
inline std::vector<NodePlacement> worked_example_placement() {
  return {{1, {202, 264}}, {2, {393, 121}}, {3, {462, 146}}, {4, {303, 437}},
          {5, {266, 406}}, {6, {476, 162}}, {7, {300, 137}}, {8, {377, 419}},
          {9, {275, 355}}, {10, {463, 349}}};
}

// Residual energies by id 1..10. Uniform values cannot reproduce the worked
// example; it needs 7 above 10 above 1 and 9 above 2.
inline std::vector<double> worked_example_energy() { return {1, 2, 1, 1, 1, 1, 5, 1, 4, 3}; }

inline std::vector<NodeAttributes> uniform_attributes(const UdgSnapshot& g, double energy = 1.0) {
  const std::vector<double> e(g.size(), energy);
  const std::vector<double> s(g.size(), 0.0);
  return make_attributes(g, e, s);
}

// Attributes with distinct random energies and speeds.
inline std::vector<NodeAttributes> random_attributes(const UdgSnapshot& g, std::mt19937_64& rng,
                                                     double v_max = 5.0) {
  std::uniform_real_distribution<double> energy(1.0, 15.0);
  std::uniform_real_distribution<double> speed(0.0, v_max);
  std::vector<double> e(g.size()), s(g.size());
  for (auto& x : e) x = energy(rng);
  for (auto& x : s) x = speed(rng);
  return make_attributes(g, e, s);
}

// Connected UDG at the density of 100 nodes in 1000 m x 1000 m with R = 250 m.
inline UdgSnapshot random_graph(std::mt19937_64& rng, std::size_t n) {
  const double side = 1000.0 * std::sqrt(static_cast<double>(n) / 100.0);
  return random_connected_udg(n, Area{side, side}, 250.0, rng());
}

// Small connected UDG, a few hops across.
inline UdgSnapshot small_graph(std::mt19937_64& rng, std::size_t n) {
  const double side = 200.0 * std::sqrt(static_cast<double>(n));
  return random_connected_udg(n, Area{side, side}, 250.0, rng());
}

}  // namespace cdsim::testing
