#include "cdsim/backbone.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

namespace cdsim {

namespace {

constexpr std::array<std::string_view, 5> kTags = {"EAS_CDS", "ADJIH_MPR_CDS", "WU_EMPR",
                                                   "CHEN_DEMPR", "MIN_VELOCITY"};

bool subset(const NodeSet& a, const NodeSet& b) { return a.is_subset_of(b); }

bool has_unconnected_neighbors(const UdgSnapshot& g, std::size_t v) {
  auto nbrs = g.neighbors(v);
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
      if (!g.adjacent(nbrs[i], nbrs[j])) return true;
    }
  }
  return false;
}

// Highest-ranked member of `s`; `s` must be non-empty.
std::size_t top_of(const NodeSet& s, const Ranking& ranking) {
  std::size_t best = s.find_first();
  for (auto i = s.find_next(best); i != NodeSet::npos; i = s.find_next(i)) {
    if (ranking.less(best, i)) best = i;
  }
  return best;
}

// Adds nodes of `candidates` (in the given order) to `black` until it is a CDS.
std::size_t restore_until_cds(const UdgSnapshot& g, NodeSet& black,
                              const std::vector<std::size_t>& candidates) {
  std::size_t restored = 0;
  for (std::size_t c : candidates) {
    if (is_cds(g, black)) break;
    if (black.test(c)) continue;
    black.set(c);
    ++restored;
  }
  return restored;
}

std::vector<std::size_t> descending_within(const NodeSet& s, const Ranking& ranking) {
  std::vector<std::size_t> out;
  const auto& asc = ranking.ascending();
  for (auto it = asc.rbegin(); it != asc.rend(); ++it) {
    if (s.test(*it)) out.push_back(*it);
  }
  return out;
}

void require_connected(const UdgSnapshot& g, std::string_view who) {
  if (!g.connected()) throw Error(std::string(who) + ": graph is disconnected");
}

}  // namespace

std::string_view to_string(Algorithm algorithm) { return kTags[static_cast<std::size_t>(algorithm)]; }

Algorithm parse_algorithm(std::string_view tag) {
  for (std::size_t i = 0; i < kTags.size(); ++i) {
    if (kTags[i] == tag) return static_cast<Algorithm>(i);
  }
  throw Error("unknown algorithm tag '" + std::string(tag) + "'");
}

bool priority_less(const NodeAttributes& a, const NodeAttributes& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  if (a.speed != b.speed) return a.speed > b.speed;
  if (a.degree != b.degree) return a.degree < b.degree;
  return a.id > b.id;
}

bool velocity_priority_less(const NodeAttributes& a, const NodeAttributes& b) {
  if (a.speed != b.speed) return a.speed > b.speed;
  if (a.degree != b.degree) return a.degree < b.degree;
  return a.id > b.id;
}

bool id_priority_less(const NodeAttributes& a, const NodeAttributes& b) { return a.id > b.id; }

bool degree_priority_less(const NodeAttributes& a, const NodeAttributes& b) {
  if (a.degree != b.degree) return a.degree < b.degree;
  return a.id > b.id;
}

std::vector<NodeAttributes> make_attributes(const UdgSnapshot& g, std::span<const double> energy,
                                            std::span<const double> speed) {
  if (energy.size() != g.size() || speed.size() != g.size()) {
    throw Error("make_attributes: attribute vectors do not match the snapshot");
  }
  std::vector<NodeAttributes> attrs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (energy[i] < 0.0 || speed[i] < 0.0) {
      throw Error("make_attributes: negative energy or speed for node " + std::to_string(g.id(i)));
    }
    attrs[i] = {g.id(i), energy[i], speed[i], g.degree(i)};
  }
  return attrs;
}

Ranking::Ranking(std::span<const NodeAttributes> attrs, PriorityLess less)
    : order_(attrs.size()), rank_(attrs.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(),
            [&](std::size_t a, std::size_t b) { return less(attrs[a], attrs[b]); });
  for (std::size_t k = 0; k < order_.size(); ++k) rank_[order_[k]] = k;
}

NodeSet Coloring::black() const {
  NodeSet s(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if (colors[i] == Color::Black) s.set(i);
  }
  return s;
}

std::size_t Coloring::black_count() const {
  return static_cast<std::size_t>(std::count(colors.begin(), colors.end(), Color::Black));
}

Coloring coloring_from_black(const UdgSnapshot& g, const NodeSet& black) {
  Coloring c;
  c.colors.assign(g.size(), Color::White);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (black.test(i)) {
      c.colors[i] = Color::Black;
    } else if (g.neighbor_set(i).intersects(black)) {
      c.colors[i] = Color::Gray;
    }
  }
  return c;
}

NodeSet greedy_mpr(std::size_t u, const NeighborTable& tables, const Ranking& ranking,
                   const MprOptions& options) {
  const NodeSet& n1 = tables.n1_open[u];
  const NodeSet& n2 = tables.n2[u];
  const std::size_t n = n1.size();

  NodeSet mpr = options.preselected.size() == n ? (options.preselected & n1) : NodeSet(n);
  NodeSet uncovered = n2;
  for (auto c = mpr.find_first(); c != NodeSet::npos; c = mpr.find_next(c)) {
    uncovered -= tables.n1_open[c];
  }

  // Sole covers are forced.
  for (auto x = uncovered.find_first(); x != NodeSet::npos; x = uncovered.find_next(x)) {
    NodeSet covers = tables.n1_open[x] & n1;
    if (covers.count() == 1) mpr.set(covers.find_first());
  }
  for (auto c = mpr.find_first(); c != NodeSet::npos; c = mpr.find_next(c)) {
    uncovered -= tables.n1_open[c];
  }

  while (uncovered.any()) {
    std::size_t best = NodeSet::npos;
    std::size_t best_gain = 0;
    for (auto c = n1.find_first(); c != NodeSet::npos; c = n1.find_next(c)) {
      if (mpr.test(c)) continue;
      const std::size_t gain = (tables.n1_open[c] & uncovered).count();
      if (gain == 0) continue;
      bool better = false;
      if (best == NodeSet::npos) {
        better = true;
      } else if (options.preference == MprPreference::MostCoverage && gain != best_gain) {
        better = gain > best_gain;
      } else {
        better = ranking.less(best, c);
      }
      if (better) {
        best = c;
        best_gain = gain;
      }
    }
    if (best == NodeSet::npos) {
      throw Error("greedy_mpr: a 2-hop neighbor is not reachable through any 1-hop neighbor");
    }
    mpr.set(best);
    uncovered -= tables.n1_open[best];
  }
  return mpr;
}

NodeSet greedy_mpr(std::size_t u, const NeighborTable& tables,
                   std::span<const NodeAttributes> attrs) {
  return greedy_mpr(u, tables, Ranking(attrs, priority_less));
}

MprAssignment greedy_mpr_all(const NeighborTable& tables, const Ranking& ranking,
                             MprPreference preference) {
  MprAssignment out;
  out.reserve(tables.n1_open.size());
  MprOptions options;
  options.preference = preference;
  for (std::size_t u = 0; u < tables.n1_open.size(); ++u) {
    out.push_back(greedy_mpr(u, tables, ranking, options));
  }
  return out;
}

Coloring mark_from_mprs(const UdgSnapshot& g, const MprAssignment& assignment,
                        const Ranking& ranking) {
  NodeSet black = g.empty_set();
  for (const auto& mpr : assignment) black |= mpr;
  if (black.none() && g.size() > 0) black.set(ranking.highest());
  return coloring_from_black(g, black);
}

Coloring prune_rule1(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     const Ranking& ranking) {
  NodeSet black = coloring.black();
  for (std::size_t v : ranking.ascending()) {
    if (!black.test(v)) continue;
    const NodeSet candidates = tables.n1_open[v] & black;
    for (auto u = candidates.find_first(); u != NodeSet::npos; u = candidates.find_next(u)) {
      if (ranking.less(v, u) && subset(tables.n1_closed[v], tables.n1_closed[u])) {
        black.reset(v);
        break;
      }
    }
  }
  return coloring_from_black(g, black);
}

Coloring prune_rule1(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     std::span<const NodeAttributes> attrs) {
  return prune_rule1(g, tables, coloring, Ranking(attrs, priority_less));
}

namespace {

// Whether Black v may be unmarked given two Black neighbors u and w.
bool rule2_unmarks(std::size_t v, std::size_t u, std::size_t w, const NeighborTable& t,
                   const Ranking& ranking) {
  const NodeSet& nv = t.n1_open[v];
  const NodeSet& nu = t.n1_open[u];
  const NodeSet& nw = t.n1_open[w];
  if (!subset(nv, nu | nw)) return false;
  const bool u_covered = subset(nu, nv | nw);
  const bool w_covered = subset(nw, nu | nv);
  if (!u_covered && !w_covered) return true;
  if (u_covered && !w_covered) return ranking.less(v, u);
  if (!u_covered && w_covered) return ranking.less(v, w);
  return ranking.less(v, u) && ranking.less(v, w);
}

}  // namespace

Coloring prune_rule2(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     const Ranking& ranking, std::size_t* restored) {
  const NodeSet before = coloring.black();
  NodeSet black = before;
  for (std::size_t v : ranking.ascending()) {
    if (!black.test(v)) continue;
    const NodeSet nbrs = tables.n1_open[v] & black;
    bool unmark = false;
    for (auto u = nbrs.find_first(); u != NodeSet::npos && !unmark; u = nbrs.find_next(u)) {
      for (auto w = nbrs.find_next(u); w != NodeSet::npos; w = nbrs.find_next(w)) {
        if (rule2_unmarks(v, u, w, tables, ranking)) {
          unmark = true;
          break;
        }
      }
    }
    if (unmark) black.reset(v);
  }

  std::size_t count = 0;
  if (before.any() && !is_cds(g, black)) {
    count = restore_until_cds(g, black, descending_within(before - black, ranking));
  }
  if (restored != nullptr) *restored = count;
  return coloring_from_black(g, black);
}

Coloring prune_rule2(const UdgSnapshot& g, const NeighborTable& tables, const Coloring& coloring,
                     std::span<const NodeAttributes> attrs, std::size_t* restored) {
  return prune_rule2(g, tables, coloring, Ranking(attrs, priority_less), restored);
}

namespace {

BackboneResult pruning_pipeline(Algorithm algorithm, const UdgSnapshot& g,
                                const NeighborTable& tables, const Ranking& ranking,
                                MprPreference preference) {
  BackboneResult r;
  r.algorithm = algorithm;
  r.mpr = greedy_mpr_all(tables, ranking, preference);
  Coloring marked = mark_from_mprs(g, r.mpr, ranking);
  r.marked = marked.black_count();
  Coloring pruned = prune_rule1(g, tables, marked, ranking);
  r.after_rule1 = pruned.black_count();
  r.coloring = prune_rule2(g, tables, pruned, ranking, &r.safety_restores);
  return r;
}

// Selector-based families: a node joins when it is the rule-1 leader of its
// closed neighborhood (optionally requiring two unconnected neighbors), or
// when its own leader neighbor picked it as an MPR.
BackboneResult selector_pipeline(Algorithm algorithm, const UdgSnapshot& g,
                                 const NeighborTable& tables, const Ranking& ranking,
                                 bool seed_free_neighbors, bool require_unconnected) {
  const std::size_t n = g.size();
  // Leader of v's open neighborhood; npos for an isolated node.
  std::vector<std::size_t> leader(n, NodeSet::npos);
  for (std::size_t v = 0; v < n; ++v) {
    if (tables.n1_open[v].any()) leader[v] = top_of(tables.n1_open[v], ranking);
  }

  BackboneResult r;
  r.algorithm = algorithm;
  r.mpr.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    MprOptions options;
    if (seed_free_neighbors) {
      // u is a free neighbor of v when v is not u's leader.
      options.preselected = g.empty_set();
      for (std::size_t u : g.neighbors(v)) {
        if (leader[u] != v) options.preselected.set(u);
      }
    }
    r.mpr.push_back(greedy_mpr(v, tables, ranking, options));
  }

  NodeSet black = g.empty_set();
  for (std::size_t v = 0; v < n; ++v) {
    const bool leads_closed = top_of(tables.n1_closed[v], ranking) == v;
    if (leads_closed && (!require_unconnected || has_unconnected_neighbors(g, v))) black.set(v);
    if (leader[v] != NodeSet::npos && r.mpr[leader[v]].test(v)) black.set(v);
  }
  if (black.none() && n > 0) black.set(ranking.highest());
  r.marked = black.count();
  r.after_rule1 = r.marked;

  if (!is_cds(g, black)) {
    NodeSet pool = g.empty_set();
    for (const auto& m : r.mpr) pool |= m;
    std::vector<std::size_t> order = descending_within(pool, ranking);
    for (std::size_t c : descending_within(g.full_set() - pool, ranking)) order.push_back(c);
    r.safety_restores = restore_until_cds(g, black, order);
  }
  r.coloring = coloring_from_black(g, black);
  return r;
}

}  // namespace

BackboneResult eas_cds(const UdgSnapshot& g, const NeighborTable& tables,
                       std::span<const NodeAttributes> attrs) {
  require_connected(g, "eas_cds");
  return pruning_pipeline(Algorithm::EasCds, g, tables, Ranking(attrs, priority_less),
                          MprPreference::MostCoverage);
}

BackboneResult baseline_cds(Algorithm algorithm, const UdgSnapshot& g, const NeighborTable& tables,
                            std::span<const NodeAttributes> attrs) {
  switch (algorithm) {
    case Algorithm::AdjihMprCds:
      require_connected(g, "baseline_cds");
      return selector_pipeline(algorithm, g, tables, Ranking(attrs, id_priority_less), false,
                               false);
    case Algorithm::WuEmpr:
      require_connected(g, "baseline_cds");
      return selector_pipeline(algorithm, g, tables, Ranking(attrs, id_priority_less), true, true);
    case Algorithm::ChenDempr:
      require_connected(g, "baseline_cds");
      return selector_pipeline(algorithm, g, tables, Ranking(attrs, degree_priority_less), true,
                               true);
    case Algorithm::MinVelocity:
      require_connected(g, "baseline_cds");
      return pruning_pipeline(algorithm, g, tables, Ranking(attrs, velocity_priority_less),
                              MprPreference::HighestPriority);
    case Algorithm::EasCds:
      break;
  }
  throw Error("baseline_cds: unsupported algorithm tag");
}

BackboneResult construct_backbone(Algorithm algorithm, const UdgSnapshot& g,
                                  const NeighborTable& tables,
                                  std::span<const NodeAttributes> attrs) {
  if (algorithm == Algorithm::EasCds) return eas_cds(g, tables, attrs);
  return baseline_cds(algorithm, g, tables, attrs);
}

void write_backbone(std::ostream& out, const BackboneResult& result, const UdgSnapshot& g,
                    std::uint64_t seed) {
  out << to_string(result.algorithm) << ' ' << seed << ' ' << g.size() << ' ' << result.size();
  for (NodeId id : g.ids_of(result.black())) out << ' ' << id;
  out << '\n';
}

}  // namespace cdsim
