#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

#include "byztopo/explored_view.hpp"
#include "byztopo/messages.hpp"

namespace byztopo {

struct DetectorOptions {
  /// Efficiency-evaluation rules: detect when more than node_bound nodes are
  /// explored, or when the same record arrives twice from one neighbor.
  bool bound_checks = false;
  std::optional<std::size_t> node_bound;
  /// Stop sending and receiving once detect is set.
  bool halt_on_detect = false;
};

struct DetectorState {
  NodeId self;
  NodeSet neighbors;
  std::size_t k = 1;
  bool detect = false;
  bool start = true;
  ExploredView top;
  bool halted = false;
  /// Set once this node has flooded (or relayed) a detect announcement.
  bool announced = false;
  DetectorOptions options;
  std::set<std::pair<NodeId, NeighborhoodRecord>> dup_guard;

  static DetectorState initial(NodeId self, NodeSet neighbors, std::size_t k, DetectorOptions options = {}) {
    DetectorState s;
    s.self = std::move(self);
    s.neighbors = std::move(neighbors);
    s.k = k;
    s.top = ExploredView(NeighborhoodRecord{s.self, s.neighbors});
    s.options = std::move(options);
    return s;
  }
};

using DetectorTransition = Transition<DetectorState, DetectorMsg>;

inline DetectorTransition detector_init(DetectorState state) {
  if (!state.start || state.halted) return {std::move(state), {}};
  state.start = false;
  auto sends = broadcast(state.neighbors, DetectorMsg{{state.self, state.neighbors}});
  return {std::move(state), std::move(sends)};
}

namespace detail {

inline bool detector_sees_fault(DetectorState& state, const NodeId& sender, const NeighborhoodRecord& rec) {
  if (state.options.bound_checks) {
    if (!state.dup_guard.emplace(sender, rec).second) return true;
  }
  if (const auto* held = state.top.find(rec.node); held != nullptr && *held != rec.neighbors) return true;

  ExploredView extended = state.top;
  extended.insert(rec);
  if (path_number(extended, state.k) < state.k + 1) return true;
  if (state.options.bound_checks && state.options.node_bound && extended.size() > *state.options.node_bound)
    return true;
  return false;
}

}  // namespace detail

/// Fig-1 accept: divergent record or too few disjoint paths sets detect;
/// otherwise a record about a not-yet-explored node is stored and relayed to
/// every neighbor (including the one it came from).
inline DetectorTransition detector_accept(DetectorState state, const NodeId& sender, const DetectorMsg& msg) {
  if (!state.neighbors.contains(sender))
    throw std::logic_error("detector_accept: " + sender.str() + " is not a neighbor of " + state.self.str());
  if (state.halted) return {std::move(state), {}};

  const auto& rec = msg.record;
  if (detail::detector_sees_fault(state, sender, rec)) {
    state.detect = true;
    if (state.options.halt_on_detect) state.halted = true;
    return {std::move(state), {}};
  }
  if (state.top.contains(rec.node)) return {std::move(state), {}};

  state.top.insert(rec);
  auto sends = broadcast(state.neighbors, DetectorMsg{rec});
  return {std::move(state), std::move(sends)};
}

}  // namespace byztopo
