#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cdsim/netgraph.hpp"

namespace cdsim {

enum class Algorithm : std::uint8_t { EasCds, AdjihMprCds, WuEmpr, ChenDempr, MinVelocity };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms = {
    Algorithm::EasCds, Algorithm::AdjihMprCds, Algorithm::WuEmpr, Algorithm::ChenDempr,
    Algorithm::MinVelocity};

/// Tags as they appear in configs and CSV: EAS_CDS, ADJIH_MPR_CDS, WU_EMPR,
/// CHEN_DEMPR, MIN_VELOCITY.
std::string_view to_string(Algorithm algorithm);
/// Throws Error on an unknown tag.
Algorithm parse_algorithm(std::string_view tag);

struct NodeAttributes {
  NodeId id = 0;
  double energy = 0.0;  // residual joules
  double speed = 0.0;   // m/s
  std::size_t degree = 0;
};

/// True iff `a` ranks strictly below `b`: less energy, then faster, then
/// lower degree, then larger id.
bool priority_less(const NodeAttributes& a, const NodeAttributes& b);
/// Energy-blind variant: faster, then lower degree, then larger id.
bool velocity_priority_less(const NodeAttributes& a, const NodeAttributes& b);
/// Larger id ranks lower.
bool id_priority_less(const NodeAttributes& a, const NodeAttributes& b);
/// Lower degree, then larger id.
bool degree_priority_less(const NodeAttributes& a, const NodeAttributes& b);

using PriorityLess = bool (*)(const NodeAttributes&, const NodeAttributes&);

/// Attributes indexed like `g`, degree taken from the snapshot.
std::vector<NodeAttributes> make_attributes(const UdgSnapshot& g, std::span<const double> energy,
                                            std::span<const double> speed);

/// A priority order materialized over snapshot indices.
class Ranking {
 public:
  Ranking(std::span<const NodeAttributes> attrs, PriorityLess less);

  bool less(std::size_t a, std::size_t b) const { return rank_[a] < rank_[b]; }
  std::size_t rank(std::size_t index) const { return rank_[index]; }
  /// Indices from lowest to highest priority.
  const std::vector<std::size_t>& ascending() const { return order_; }
  std::size_t highest() const { return order_.back(); }
  std::size_t size() const { return order_.size(); }

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

enum class Color : std::uint8_t { White, Black, Gray };

struct Coloring {
  std::vector<Color> colors;

  NodeSet black() const;
  std::size_t black_count() const;
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

/// Black = `black`; Gray = other nodes with a Black neighbor; the rest White.
Coloring coloring_from_black(const UdgSnapshot& g, const NodeSet& black);

/// MPR(u) per snapshot index.
using MprAssignment = std::vector<NodeSet>;

enum class MprPreference {
  MostCoverage,     // neighbor covering the most uncovered 2-hop nodes, ties by rank
  HighestPriority,  // highest-ranked neighbor that covers anything still uncovered
};

struct MprOptions {
  MprPreference preference = MprPreference::MostCoverage;
  /// Neighbors placed in MPR(u) before the greedy pass; their coverage counts.
  NodeSet preselected;
};

/// Greedy multipoint relay set of `u`: every neighbor that is the only cover
/// of some 2-hop node, then greedy additions until N2(u) is covered.
NodeSet greedy_mpr(std::size_t u, const NeighborTable& tables, const Ranking& ranking,
                   const MprOptions& options = {});
NodeSet greedy_mpr(std::size_t u, const NeighborTable& tables,
                   std::span<const NodeAttributes> attrs);

MprAssignment greedy_mpr_all(const NeighborTable& tables, const Ranking& ranking,
                             MprPreference preference = MprPreference::MostCoverage);

/// Black = union of all MPR sets. An empty union on a non-empty graph forces
/// the highest-ranked node Black.
Coloring mark_from_mprs(const UdgSnapshot& g, const MprAssignment& assignment,
                        const Ranking& ranking);

/// Unmarks Black v when some Black u has N[v] ⊆ N[u] and outranks v.
Coloring prune_rule1(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     const Ranking& ranking);
Coloring prune_rule1(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     std::span<const NodeAttributes> attrs);

/// Unmarks Black v covered by two Black neighbors u, w (open neighborhoods).
/// If the result is not a CDS, previously pruned nodes are restored in
/// descending rank; the number restored goes to `restored`.
Coloring prune_rule2(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     const Ranking& ranking, std::size_t* restored = nullptr);
Coloring prune_rule2(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     std::span<const NodeAttributes> attrs, std::size_t* restored = nullptr);

struct BackboneResult {
  Algorithm algorithm = Algorithm::EasCds;
  Coloring coloring;
  MprAssignment mpr;
  double timestamp = 0.0;
  std::size_t marked = 0;       // Black count straight after marking
  std::size_t after_rule1 = 0;  // only meaningful for the pruning pipelines
  std::size_t safety_restores = 0;

  NodeSet black() const { return coloring.black(); }
  std::size_t size() const { return coloring.black_count(); }
};

/// MPR selection, marking, Rule 1, Rule 2. Throws Error on a disconnected graph.
BackboneResult eas_cds(const UdgSnapshot& g, const NeighborTable& tables,
                       std::span<const NodeAttributes> attrs);

/// One of the four comparison algorithms. Throws Error on a disconnected graph
/// or when handed EasCds.
BackboneResult baseline_cds(Algorithm algorithm, const UdgSnapshot& g, const NeighborTable& tables,
                            std::span<const NodeAttributes> attrs);

/// Dispatches to eas_cds or baseline_cds.
BackboneResult construct_backbone(Algorithm algorithm, const UdgSnapshot& g,
                                  const NeighborTable& tables,
                                  std::span<const NodeAttributes> attrs);

/// `algorithm seed n |CDS| members...` on one line.
void write_backbone(std::ostream& out, const BackboneResult& result, const UdgSnapshot& g,
                    std::uint64_t seed);

}  // namespace cdsim
