#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byztopo/node_id.hpp"

namespace byztopo {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected graph stored as a symmetric adjacency map.
///
/// add_edge keeps the structure symmetric. The raw-adjacency constructor
/// accepts anything so that malformed input can be inspected with
/// validate_topology().
class Topology {
 public:
  using Adjacency = std::map<NodeId, NodeSet>;

  Topology() = default;
  explicit Topology(Adjacency adjacency) : adj_(std::move(adjacency)) {}

  static Topology from_edges(const std::vector<std::pair<NodeId, NodeId>>& edges) {
    Topology t;
    for (const auto& [u, v] : edges) t.add_edge(u, v);
    return t;
  }

  void add_node(const NodeId& u) { adj_[u]; }

  void add_edge(const NodeId& u, const NodeId& v) {
    if (u == v) throw GraphError("self-loop on " + u.str());
    adj_[u].insert(v);
    adj_[v].insert(u);
  }

  const Adjacency& adjacency() const noexcept { return adj_; }

  bool has_node(const NodeId& u) const { return adj_.contains(u); }
  bool has_edge(const NodeId& u, const NodeId& v) const {
    auto it = adj_.find(u);
    return it != adj_.end() && it->second.contains(v);
  }

  const NodeSet& neighbors(const NodeId& u) const {
    auto it = adj_.find(u);
    if (it == adj_.end()) throw GraphError("unknown node " + u.str());
    return it->second;
  }

  NeighborhoodRecord record(const NodeId& u) const { return {u, neighbors(u)}; }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(adj_.size());
    for (const auto& [u, _] : adj_) out.push_back(u);
    return out;
  }

  std::size_t node_count() const noexcept { return adj_.size(); }

  std::size_t edge_count() const {
    std::size_t deg = 0;
    for (const auto& [_, nb] : adj_) deg += nb.size();
    return deg / 2;
  }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& [_, nb] : adj_) d = std::max(d, nb.size());
    return d;
  }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (const auto& [u, nb] : adj_)
      for (const auto& v : nb)
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  bool is_complete() const {
    const auto n = adj_.size();
    return std::all_of(adj_.begin(), adj_.end(),
                       [n](const auto& kv) { return kv.second.size() + 1 == n; });
  }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  Adjacency adj_;
};

/// Returns a description of the first broken invariant, or nullopt when the
/// adjacency is symmetric, loop-free and closed over its node set.
inline std::optional<std::string> validate_topology(const Topology& t) {
  for (const auto& [u, nb] : t.adjacency()) {
    if (u.empty()) return "empty node id";
    for (const auto& v : nb) {
      if (v == u) return "self-loop " + u.str();
      auto it = t.adjacency().find(v);
      if (it == t.adjacency().end())
        return "dangling neighbor (" + u.str() + "," + v.str() + "): " + v.str() + " has no entry";
      if (!it->second.contains(u)) return "asymmetric edge (" + u.str() + "," + v.str() + ")";
    }
  }
  return std::nullopt;
}

// Edge-list text format: "u v" per line, '#' starts a comment, blank lines ignored.

inline Topology parse_edge_list(std::istream& in) {
  Topology t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw GraphError("line " + std::to_string(lineno) + ": expected \"u v\", got " +
                       std::to_string(toks.size()) + " tokens");
    if (toks[0] == toks[1])
      throw GraphError("line " + std::to_string(lineno) + ": self-loop on " + toks[0]);
    t.add_edge(NodeId(toks[0]), NodeId(toks[1]));
  }
  return t;
}

inline Topology parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Topology& t) {
  for (const auto& [u, v] : t.edges()) out << u << ' ' << v << '\n';
}

inline std::string to_edge_list(const Topology& t) {
  std::ostringstream out;
  write_edge_list(out, t);
  return out.str();
}

}  // namespace byztopo
