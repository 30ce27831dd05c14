#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "byztopo/topology.hpp"

namespace byztopo {

namespace detail {

// Residual network with unit capacities; augmenting paths by BFS.
class UnitFlowNetwork {
 public:
  explicit UnitFlowNetwork(std::size_t vertices) : out_(vertices) {}

  void add_arc(std::size_t from, std::size_t to, int capacity = 1) {
    out_[from].push_back(arcs_.size());
    arcs_.push_back({to, capacity});
    out_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0});
  }

  std::size_t max_flow(std::size_t source, std::size_t sink) {
    std::size_t flow = 0;
    std::vector<std::size_t> via(out_.size());
    while (true) {
      std::vector<bool> seen(out_.size(), false);
      std::queue<std::size_t> frontier;
      frontier.push(source);
      seen[source] = true;
      while (!frontier.empty() && !seen[sink]) {
        const auto x = frontier.front();
        frontier.pop();
        for (auto a : out_[x]) {
          const auto& arc = arcs_[a];
          if (arc.capacity > 0 && !seen[arc.to]) {
            seen[arc.to] = true;
            via[arc.to] = a;
            frontier.push(arc.to);
          }
        }
      }
      if (!seen[sink]) return flow;
      for (auto x = sink; x != source;) {
        const auto a = via[x];
        arcs_[a].capacity -= 1;
        arcs_[a ^ 1].capacity += 1;
        x = arcs_[a ^ 1].to;
      }
      ++flow;
    }
  }

 private:
  struct Arc {
    std::size_t to;
    int capacity;
  };
  std::vector<std::vector<std::size_t>> out_;
  std::vector<Arc> arcs_;
};

}  // namespace detail

/// Maximum number of pairwise internally node-disjoint u-v paths.
///
/// Every vertex other than u and v is split into an in-half and an out-half
/// joined by a unit arc, so each vertex can carry one path. A direct u-v edge
/// contributes exactly one path.
inline std::size_t internally_disjoint_paths(const Topology& t, const NodeId& u, const NodeId& v) {
  if (u == v) throw GraphError("internally_disjoint_paths: endpoints coincide (" + u.str() + ")");
  if (!t.has_node(u)) throw GraphError("internally_disjoint_paths: unknown node " + u.str());
  if (!t.has_node(v)) throw GraphError("internally_disjoint_paths: unknown node " + v.str());

  std::map<NodeId, std::size_t> index;
  for (const auto& [x, _] : t.adjacency()) index.emplace(x, index.size());
  auto in_half = [&](const NodeId& x) { return 2 * index.at(x); };
  auto out_half = [&](const NodeId& x) { return 2 * index.at(x) + 1; };

  detail::UnitFlowNetwork net(2 * index.size());
  for (const auto& [x, nb] : t.adjacency()) {
    if (x != u && x != v) net.add_arc(in_half(x), out_half(x));
    for (const auto& y : nb) net.add_arc(out_half(x), in_half(y));
  }
  return net.max_flow(out_half(u), in_half(v));
}

/// Vertex connectivity: n-1 for complete graphs, otherwise the minimum
/// disjoint-path count over non-adjacent pairs (0 when disconnected).
inline std::size_t vertex_connectivity(const Topology& t) {
  if (t.node_count() < 2) throw GraphError("vertex_connectivity: trivial graph");
  if (t.is_complete()) return t.node_count() - 1;
  const auto nodes = t.nodes();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (t.has_edge(nodes[i], nodes[j])) continue;
      best = std::min(best, internally_disjoint_paths(t, nodes[i], nodes[j]));
      if (best == 0) return 0;
    }
  }
  return best;
}

}  // namespace byztopo
