#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

namespace byztopo {

/// Opaque process identifier.
///
/// Ordering is shortlex (shorter names first, then lexicographic) so that
/// numeric names generated by the graph tools sort naturally ("2" < "10")
/// while arbitrary tokens still get a stable total order. One identifier is
/// one unit of message-size accounting.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::string name) : name_(std::move(name)) {}

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
    if (auto c = a.name_.size() <=> b.name_.size(); c != 0) return c;
    return a.name_.compare(b.name_) <=> 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const NodeId& id) { return os << id.name_; }

 private:
  std::string name_;
};

using NodeSet = std::set<NodeId>;

inline namespace literals {
inline NodeId operator""_id(const char* s, std::size_t n) { return NodeId(std::string(s, n)); }
}  // namespace literals

/// Builds a NodeSet from whitespace-separated names: `node_set("a b c")`.
inline NodeSet node_set(std::string_view names) {
  NodeSet out;
  std::istringstream in{std::string(names)};
  std::string tok;
  while (in >> tok) out.insert(NodeId(tok));
  return out;
}

/// The (process, neighborhood) tuple that every protocol message carries.
struct NeighborhoodRecord {
  NodeId node;
  NodeSet neighbors;

  friend bool operator==(const NeighborhoodRecord&, const NeighborhoodRecord&) = default;
  friend auto operator<=>(const NeighborhoodRecord&, const NeighborhoodRecord&) = default;

  bool well_formed() const { return !node.empty() && !neighbors.contains(node); }
};

inline std::string to_string(const NodeSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& id : s) {
    if (!first) out += ",";
    out += id.str();
    first = false;
  }
  return out + "}";
}

inline std::string to_string(const NeighborhoodRecord& r) {
  return "(" + r.node.str() + "," + to_string(r.neighbors) + ")";
}

inline bool intersection_within(const NodeSet& a, const NodeSet& b, const NodeId& allowed) {
  // both sets are sorted; walk them together
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      if (*i != allowed) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

}  // namespace byztopo

template <>
struct std::hash<byztopo::NodeId> {
  std::size_t operator()(const byztopo::NodeId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
