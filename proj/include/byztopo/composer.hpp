#pragma once

#include <map>
#include <set>
#include <tuple>
#include <variant>

#include "byztopo/connectivity.hpp"
#include "byztopo/detector.hpp"
#include "byztopo/explorer.hpp"

namespace byztopo {

// ---------------------------------------------------------------------------
// Terminating Detector: detect-announcement flooding.

/// Announcement of `origin`'s detection to every neighbor.
inline std::vector<Send<DetectAnnouncement>> detect_flood(const DetectorState& state, const NodeId& origin) {
  return broadcast(state.neighbors, DetectAnnouncement{origin});
}

/// Own detection under the terminating variant: flood once, then halt.
inline Transition<DetectorState, DetectAnnouncement> detector_start_flood(DetectorState state) {
  if (!state.detect || state.announced) return {std::move(state), {}};
  state.announced = true;
  auto sends = detect_flood(state, state.self);
  state.halted = true;
  return {std::move(state), std::move(sends)};
}

/// First announcement is relayed and the node halts; later ones are absorbed.
inline Transition<DetectorState, DetectAnnouncement> detector_on_announcement(DetectorState state,
                                                                              const DetectAnnouncement& msg) {
  if (state.announced) return {std::move(state), {}};
  state.announced = true;
  auto sends = detect_flood(state, msg.origin);
  state.halted = true;
  return {std::move(state), std::move(sends)};
}

// ---------------------------------------------------------------------------
// Terminating Explorer: message filters.

struct TerminationFilters {
  std::size_t fake_threshold = 1;
  bool confirmed_ignore = true;
  bool duplicate_suppress = true;
  bool fake_detection = true;
  NodeSet fake_set;

  // (sender, message) pairs already delivered
  std::set<std::pair<NodeId, ExplorerMsg>> seen;
  // node -> ctop size at its last evaluation
  std::map<NodeId, std::size_t> evaluated_at;

  static TerminationFilters for_k(std::size_t k) {
    TerminationFilters f;
    f.fake_threshold = k;
    return f;
  }
};

enum class FilterVerdict { Deliver, Discard };

/// Whether the confirmed view proves `node` fake: it is mentioned by the
/// view yet at most `threshold` internally disjoint paths lead to it.
inline bool judged_fake(const ExplorerState& state, const NodeId& node, std::size_t threshold) {
  if (node == state.self || state.ctop.contains(node)) return false;
  const auto g = closure_graph(state.ctop);
  if (!g.has_node(node)) return false;
  return internally_disjoint_paths(g, state.self, node) <= threshold;
}

inline FilterVerdict apply_termination_filters(const ExplorerState& state, TerminationFilters& filters,
                                               const NodeId& sender, const ExplorerMsg& msg) {
  const auto& r = msg.record.node;
  if (filters.confirmed_ignore && state.ctop.contains(r)) return FilterVerdict::Discard;

  if (filters.fake_detection && !filters.fake_set.contains(r)) {
    // re-evaluate lazily, only when the confirmed view has grown
    auto [it, fresh] = filters.evaluated_at.try_emplace(r, state.ctop.size());
    if (fresh || it->second != state.ctop.size()) {
      it->second = state.ctop.size();
      if (judged_fake(state, r, filters.fake_threshold)) filters.fake_set.insert(r);
    }
  }
  if (filters.fake_set.contains(r)) return FilterVerdict::Discard;

  if (filters.duplicate_suppress && !filters.seen.emplace(sender, msg).second) return FilterVerdict::Discard;
  return FilterVerdict::Deliver;
}

// ---------------------------------------------------------------------------
// Detector -> Explorer composition.

enum class ComposedMode { Detector, Explorer };

struct ComposedState {
  ComposedMode mode = ComposedMode::Detector;
  DetectorState detector_state;
  ExplorerState explorer_state;
  bool seen_detect_flood = false;

  static ComposedState initial(const NodeId& self, const NodeSet& neighbors, std::size_t k,
                               DetectorOptions dopt = {}, ExplorerOptions eopt = {}) {
    dopt.halt_on_detect = false;
    return {ComposedMode::Detector, DetectorState::initial(self, neighbors, k, dopt),
            ExplorerState::initial(self, neighbors, k, eopt), false};
  }
};

enum class ComposedDisposition { Processed, Ignored, Filtered };

struct ComposedTransition {
  ComposedState state;
  std::vector<Send<ProtocolMessage>> sends;
  ComposedDisposition disposition = ComposedDisposition::Processed;
  /// Set when an ExplorerMsg reached explorer_accept.
  bool explorer_accepted = false;
};

namespace detail {

template <class Msg>
void append_sends(std::vector<Send<ProtocolMessage>>& out, std::vector<Send<Msg>>&& in) {
  for (auto& s : in) out.push_back({std::move(s.to), ProtocolMessage{std::move(s.message)}});
}

inline void switch_to_explorer(ComposedTransition& t) {
  t.state.mode = ComposedMode::Explorer;
  auto init = explorer_init(std::move(t.state.explorer_state));
  t.state.explorer_state = std::move(init.state);
  append_sends(t.sends, std::move(init.sends));
}

inline void composed_explorer_delivery(ComposedTransition& t, const NodeId& sender, const ExplorerMsg& msg,
                                       TerminationFilters* filters) {
  if (filters != nullptr &&
      apply_termination_filters(t.state.explorer_state, *filters, sender, msg) == FilterVerdict::Discard) {
    t.disposition = ComposedDisposition::Filtered;
    return;
  }
  auto acc = explorer_accept(std::move(t.state.explorer_state), sender, msg);
  t.state.explorer_state = std::move(acc.state);
  append_sends(t.sends, std::move(acc.sends));
  t.explorer_accepted = true;
}

}  // namespace detail

inline Transition<ComposedState, ProtocolMessage> composed_init(ComposedState state) {
  Transition<ComposedState, ProtocolMessage> out{std::move(state), {}};
  if (out.state.mode == ComposedMode::Detector) {
    auto init = detector_init(std::move(out.state.detector_state));
    out.state.detector_state = std::move(init.state);
    detail::append_sends(out.sends, std::move(init.sends));
  }
  return out;
}

/// Runs Detector until a fault is seen (locally, or via the first Explorer
/// message), then Explorer for good. Detector traffic is ignored afterwards.
inline ComposedTransition composed_accept(ComposedState state, const NodeId& sender, const ProtocolMessage& msg,
                                          TerminationFilters* filters = nullptr) {
  ComposedTransition t{std::move(state), {}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DetectorMsg>) {
          if (t.state.mode == ComposedMode::Explorer) {
            t.disposition = ComposedDisposition::Ignored;
            return;
          }
          const bool had_detected = t.state.detector_state.detect;
          auto acc = detector_accept(std::move(t.state.detector_state), sender, m);
          t.state.detector_state = std::move(acc.state);
          detail::append_sends(t.sends, std::move(acc.sends));
          if (!had_detected && t.state.detector_state.detect) detail::switch_to_explorer(t);
        } else if constexpr (std::is_same_v<T, ExplorerMsg>) {
          if (t.state.mode == ComposedMode::Detector) detail::switch_to_explorer(t);
          detail::composed_explorer_delivery(t, sender, m, filters);
        } else {
          if (t.state.mode == ComposedMode::Explorer) {
            t.disposition = ComposedDisposition::Ignored;
            return;
          }
          t.state.seen_detect_flood = true;
          detail::switch_to_explorer(t);
        }
      },
      msg);
  return t;
}

}  // namespace byztopo
