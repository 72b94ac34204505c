#include "cdsim/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace cdsim {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

UdgSnapshot UdgSnapshot::build(std::span<const NodePlacement> placements, double range) {
  if (placements.empty()) {
    throw Error("build_udg: at least one node is required");
  }
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw Error("build_udg: range must be positive and finite");
  }

  std::vector<NodePlacement> sorted(placements.begin(), placements.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const NodePlacement& a, const NodePlacement& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& p = sorted[i].position;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error("build_udg: non-finite coordinate for node " + std::to_string(sorted[i].id));
    }
    if (i > 0 && sorted[i - 1].id == sorted[i].id) {
      throw Error("build_udg: duplicate node id " + std::to_string(sorted[i].id));
    }
  }

  UdgSnapshot g;
  const std::size_t n = sorted.size();
  g.range_ = range;
  g.ids_.reserve(n);
  g.positions_.reserve(n);
  for (const auto& p : sorted) {
    g.ids_.push_back(p.id);
    g.positions_.push_back(p.position);
  }
  g.adjacency_.assign(n, {});
  g.neighbor_bits_.assign(n, NodeSet(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (distance(g.positions_[a], g.positions_[b]) < range) {
        g.adjacency_[a].push_back(b);
        g.adjacency_[b].push_back(a);
        g.neighbor_bits_[a].set(b);
        g.neighbor_bits_[b].set(a);
      }
    }
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  return g;
}

std::optional<std::size_t> UdgSnapshot::index_of(NodeId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::vector<NodePlacement> UdgSnapshot::placements() const {
  std::vector<NodePlacement> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back({ids_[i], positions_[i]});
  return out;
}

std::size_t UdgSnapshot::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

bool UdgSnapshot::connected() const { return induces_connected(*this, full_set()); }

NodeSet UdgSnapshot::subset_of(std::span<const NodeId> ids) const {
  NodeSet s(size());
  for (NodeId id : ids) {
    auto index = index_of(id);
    if (!index) throw Error("subset refers to unknown node id " + std::to_string(id));
    s.set(*index);
  }
  return s;
}

std::vector<NodeId> UdgSnapshot::ids_of(const NodeSet& set) const {
  std::vector<NodeId> out;
  for (auto i = set.find_first(); i != NodeSet::npos; i = set.find_next(i)) out.push_back(ids_[i]);
  return out;
}

NeighborTable neighbor_tables(const UdgSnapshot& g) {
  const std::size_t n = g.size();
  NeighborTable t;
  t.n1_open.reserve(n);
  t.n1_closed.reserve(n);
  t.n2.reserve(n);
  for (std::size_t u = 0; u < n; ++u) {
    NodeSet open = g.neighbor_set(u);
    NodeSet closed = open;
    closed.set(u);
    NodeSet two(n);
    for (std::size_t v : g.neighbors(u)) two |= g.neighbor_set(v);
    two -= closed;
    t.n1_open.push_back(std::move(open));
    t.n1_closed.push_back(std::move(closed));
    t.n2.push_back(std::move(two));
  }
  return t;
}

bool is_dominating(const UdgSnapshot& g, const NodeSet& s) {
  NodeSet covered = s;
  for (auto i = s.find_first(); i != NodeSet::npos; i = s.find_next(i)) covered |= g.neighbor_set(i);
  return covered.all();
}

bool induces_connected(const UdgSnapshot& g, const NodeSet& s) {
  const auto start = s.find_first();
  if (start == NodeSet::npos) return true;
  NodeSet seen(g.size());
  std::vector<std::size_t> stack{start};
  seen.set(start);
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : g.neighbors(u)) {
      if (s.test(v) && !seen.test(v)) {
        seen.set(v);
        stack.push_back(v);
      }
    }
  }
  return seen == s;
}

NodeSet brute_force_min_cds(const UdgSnapshot& g, std::size_t max_nodes) {
  const std::size_t n = g.size();
  if (n > max_nodes) {
    throw Error("brute_force_min_cds: " + std::to_string(n) + " nodes exceeds cap of " +
                std::to_string(max_nodes));
  }
  if (!g.connected()) throw Error("brute_force_min_cds: graph is disconnected");

  // Combinations of each size are visited in lexicographic index order, which
  // is lexicographic id order because indices are sorted by id.
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      NodeSet s(n);
      NodeSet covered(n);
      for (std::size_t i : pick) {
        s.set(i);
        covered.set(i);
        covered |= g.neighbor_set(i);
      }
      if (covered.all() && induces_connected(g, s)) return s;

      std::size_t pos = k;
      while (pos > 0 && pick[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t j = pos; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw Error("brute_force_min_cds: no connected dominating set found");
}

UdgSnapshot random_connected_udg(std::size_t n, Area area, double range, std::uint64_t seed,
                                 std::size_t max_attempts) {
  if (n == 0) throw Error("random_connected_udg: n must be at least 1");
  if (!(area.width > 0.0) || !(area.height > 0.0)) {
    throw Error("random_connected_udg: area must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xs(0.0, area.width);
  std::uniform_real_distribution<double> ys(0.0, area.height);
  std::vector<NodePlacement> placements(n);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      placements[i].id = static_cast<NodeId>(i);
      placements[i].position.x = xs(rng);
      placements[i].position.y = ys(rng);
    }
    auto g = UdgSnapshot::build(placements, range);
    if (g.connected()) return g;
  }
  throw Error("random_connected_udg: no connected placement after " +
              std::to_string(max_attempts) + " attempts");
}

void write_graph(std::ostream& out, const UdgSnapshot& g) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu %.17g\n", g.size(), g.range());
  out << buf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& p = g.position(i);
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", g.id(i), p.x, p.y);
    out << buf;
  }
}

UdgSnapshot read_graph(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& dst) {
    while (std::getline(in, dst)) {
      if (dst.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw Error("read_graph: missing header line");
  std::istringstream header(line);
  long long count = 0;
  double range = 0.0;
  if (!(header >> count >> range) || count < 1) throw Error("read_graph: malformed header");

  std::vector<NodePlacement> placements;
  placements.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    if (!next_line(line)) throw Error("read_graph: expected " + std::to_string(count) + " nodes");
    std::istringstream row(line);
    NodePlacement p;
    if (!(row >> p.id >> p.position.x >> p.position.y)) {
      throw Error("read_graph: malformed node line '" + line + "'");
    }
    placements.push_back(p);
  }
  return UdgSnapshot::build(placements, range);
}

}  // namespace cdsim
