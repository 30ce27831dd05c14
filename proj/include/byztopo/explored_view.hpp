#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "byztopo/connectivity.hpp"
#include "byztopo/topology.hpp"

namespace byztopo {

/// A process's collected neighborhood records, at most one per node.
class ExploredView {
 public:
  using Records = std::map<NodeId, NodeSet>;

  ExploredView() = default;
  explicit ExploredView(NeighborhoodRecord own) { insert(std::move(own)); }
  explicit ExploredView(const std::vector<NeighborhoodRecord>& records) {
    for (const auto& r : records)
      if (!insert(r)) throw std::invalid_argument("duplicate record for " + r.node.str());
  }

  /// Inserts unless a record for the node is already present.
  bool insert(NeighborhoodRecord r) { return records_.emplace(std::move(r.node), std::move(r.neighbors)).second; }

  bool contains(const NodeId& u) const { return records_.contains(u); }

  const NodeSet* find(const NodeId& u) const {
    auto it = records_.find(u);
    return it == records_.end() ? nullptr : &it->second;
  }

  bool holds(const NeighborhoodRecord& r) const {
    const auto* nb = find(r.node);
    return nb != nullptr && *nb == r.neighbors;
  }

  const Records& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  NodeSet explored() const {
    NodeSet out;
    for (const auto& [u, _] : records_) out.insert(u);
    return out;
  }

  NodeSet mentioned() const {
    NodeSet out;
    for (const auto& [_, nb] : records_) out.insert(nb.begin(), nb.end());
    return out;
  }

  NodeSet unexplored() const {
    NodeSet out;
    for (const auto& [_, nb] : records_)
      for (const auto& v : nb)
        if (!records_.contains(v)) out.insert(v);
    return out;
  }

  std::vector<NeighborhoodRecord> to_records() const {
    std::vector<NeighborhoodRecord> out;
    for (const auto& [u, nb] : records_) out.push_back({u, nb});
    return out;
  }

  friend bool operator==(const ExploredView&, const ExploredView&) = default;

 private:
  Records records_;
};

/// First pair of explored records (u,U),(v,V) with u in V but v not in U.
inline std::optional<std::pair<NodeId, NodeId>> find_inconsistency(const ExploredView& view) {
  for (const auto& [v, vn] : view.records()) {
    for (const auto& u : vn) {
      const auto* un = view.find(u);
      if (un != nullptr && !un->contains(v)) return std::pair{u, v};
    }
  }
  return std::nullopt;
}

/// G': every edge asserted by an explored record plus a clique over the
/// unexplored nodes.
inline Topology closure_graph(const ExploredView& view) {
  Topology g;
  for (const auto& [u, nb] : view.records()) {
    g.add_node(u);
    for (const auto& v : nb)
      if (v != u) g.add_edge(u, v);
  }
  const auto hidden = view.unexplored();
  for (auto i = hidden.begin(); i != hidden.end(); ++i)
    for (auto j = std::next(i); j != hidden.end(); ++j) g.add_edge(*i, *j);
  return g;
}

/// 0 on an inconsistent view, k+1 when only one node is explored, otherwise
/// the minimum number of internally disjoint paths in G' between two
/// explored nodes (adjacent pairs included).
inline std::size_t path_number(const ExploredView& view, std::size_t k) {
  if (view.empty()) throw std::invalid_argument("path_number: empty view");
  if (find_inconsistency(view)) return 0;
  if (view.size() == 1) return k + 1;

  const auto g = closure_graph(view);
  const auto explored = view.explored();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (auto i = explored.begin(); i != explored.end(); ++i) {
    for (auto j = std::next(i); j != explored.end(); ++j) {
      best = std::min(best, internally_disjoint_paths(g, *i, *j));
      if (best == 0) return 0;
    }
  }
  return best;
}

}  // namespace byztopo
