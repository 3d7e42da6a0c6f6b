#include "campus/proximity.hpp"

namespace campus {

std::size_t ProximityGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& [v, nbrs] : adj) twice += nbrs.size();
  return twice / 2;
}

ProximityGraph build_graph(std::span<const ProximityScan> scans,
                           const std::set<Id>& roster, const TimeBin& bin) {
  ProximityGraph g;
  for (Id v : roster) g.adj[v];
  for (const ProximityScan& s : scans) {
    if (s.t < bin.start || s.t >= bin.end) continue;
    if (s.scanner == s.seen) continue;
    if (!roster.count(s.scanner) || !roster.count(s.seen)) continue;
    g.adj[s.scanner].insert(s.seen);
    g.adj[s.seen].insert(s.scanner);
  }
  return g;
}

std::optional<PrimaryCluster> primary_cluster(const ProximityGraph& g) {
  const std::set<Id>* best = nullptr;
  Id anchor = 0;
  for (const auto& [v, nbrs] : g.adj) {
    // Map order ascends by id, so strict > keeps the smallest id on ties.
    if (!nbrs.empty() && (!best || nbrs.size() > best->size())) {
      best = &nbrs;
      anchor = v;
    }
  }
  if (!best) return std::nullopt;
  PrimaryCluster cluster;
  cluster.anchor = anchor;
  cluster.members = *best;
  cluster.members.insert(anchor);
  return cluster;
}

}  // namespace campus
