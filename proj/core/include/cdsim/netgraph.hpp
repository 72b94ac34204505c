#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace cdsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeId = std::int32_t;

/// Node membership over snapshot indices (bit i = node at index i).
using NodeSet = boost::dynamic_bitset<>;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct NodePlacement {
  NodeId id = 0;
  Point position;
};

/// Unit-disk graph over a fixed set of placed nodes.
///
/// Nodes are stored sorted by id; "index" always means the position in that
/// order, so index order and id order agree. Two distinct nodes are adjacent
/// iff their Euclidean distance is strictly below the range.
class UdgSnapshot {
 public:
  UdgSnapshot() = default;

  /// Throws Error on an empty placement, duplicate ids, a non-finite
  /// coordinate or a non-positive range.
  static UdgSnapshot build(std::span<const NodePlacement> placements, double range);

  std::size_t size() const { return ids_.size(); }
  double range() const { return range_; }

  NodeId id(std::size_t index) const { return ids_[index]; }
  const std::vector<NodeId>& ids() const { return ids_; }
  std::optional<std::size_t> index_of(NodeId id) const;

  const Point& position(std::size_t index) const { return positions_[index]; }
  std::vector<NodePlacement> placements() const;

  /// Sorted neighbor indices.
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_[index]; }
  const NodeSet& neighbor_set(std::size_t index) const { return neighbor_bits_[index]; }
  bool adjacent(std::size_t a, std::size_t b) const { return neighbor_bits_[a].test(b); }
  std::size_t degree(std::size_t index) const { return adjacency_[index].size(); }
  std::size_t edge_count() const;

  bool connected() const;

  NodeSet empty_set() const { return NodeSet(size()); }
  NodeSet full_set() const { return NodeSet(size()).set(); }
  NodeSet subset_of(std::span<const NodeId> ids) const;
  std::vector<NodeId> ids_of(const NodeSet& set) const;

 private:
  std::vector<NodeId> ids_;
  std::vector<Point> positions_;
  double range_ = 0.0;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<NodeSet> neighbor_bits_;
};

inline UdgSnapshot build_udg(std::span<const NodePlacement> placements, double range) {
  return UdgSnapshot::build(placements, range);
}

/// Per-node 1-hop and strict 2-hop neighborhoods, all as index sets.
struct NeighborTable {
  std::vector<NodeSet> n1_open;
  std::vector<NodeSet> n1_closed;
  std::vector<NodeSet> n2;

  std::size_t degree(std::size_t index) const { return n1_open[index].count(); }
};

NeighborTable neighbor_tables(const UdgSnapshot& g);

bool is_dominating(const UdgSnapshot& g, const NodeSet& s);

/// Empty and singleton sets count as connected.
bool induces_connected(const UdgSnapshot& g, const NodeSet& s);

inline bool is_cds(const UdgSnapshot& g, const NodeSet& s) {
  return is_dominating(g, s) && induces_connected(g, s);
}

/// Exact minimum connected dominating set by search over increasing
/// cardinality. Among minimum sets the lexicographically smallest id set wins.
NodeSet brute_force_min_cds(const UdgSnapshot& g, std::size_t max_nodes = 12);

struct Area {
  double width = 1000.0;
  double height = 1000.0;

  friend bool operator==(const Area&, const Area&) = default;
};

/// Uniform placement in the area, resampled until the graph is connected.
/// Node ids are 0..n-1. Deterministic per seed.
UdgSnapshot random_connected_udg(std::size_t n, Area area, double range, std::uint64_t seed,
                                 std::size_t max_attempts = 1000);

/// Plain-text form: header `n R`, then one `id x y` line per node.
void write_graph(std::ostream& out, const UdgSnapshot& g);
UdgSnapshot read_graph(std::istream& in);

}  // namespace cdsim
