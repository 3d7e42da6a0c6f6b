#pragma once

#include <map>
#include <optional>
#include <span>

#include "campus/types.hpp"

namespace campus {

// Undirected per-bin proximity graph over one course roster. Every roster
// member is a node, possibly isolated.
struct ProximityGraph {
  std::map<Id, std::set<Id>> adj;

  std::size_t degree(Id v) const {
    auto it = adj.find(v);
    return it == adj.end() ? 0 : it->second.size();
  }
  std::size_t edge_count() const;
};

// Ego-network of the busiest node: the anchor plus its direct neighbors.
struct PrimaryCluster {
  Id anchor = 0;
  std::set<Id> members;
};

// Edge {u,v} exists iff at least one scan in either direction between u and v
// falls inside the bin and both endpoints are on the roster. Scans are not
// weighted; a repeated sighting adds nothing.
ProximityGraph build_graph(std::span<const ProximityScan> scans,
                           const std::set<Id>& roster, const TimeBin& bin);

// Returns the closed neighborhood of the maximum-degree node, ties broken by
// smallest id. An edgeless graph has no cluster.
std::optional<PrimaryCluster> primary_cluster(const ProximityGraph& g);

}  // namespace campus
