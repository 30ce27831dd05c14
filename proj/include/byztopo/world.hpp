#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "byztopo/adversary.hpp"
#include "byztopo/composer.hpp"
#include "byztopo/detector.hpp"
#include "byztopo/explorer.hpp"
#include "byztopo/topology.hpp"

namespace byztopo {

enum class Algorithm { Detector, Explorer, Composed };
enum class ScheduleMode { RoundRobin, Random };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Detector: return "detector";
    case Algorithm::Explorer: return "explorer";
    case Algorithm::Composed: return "composed";
  }
  return "?";
}

inline const char* to_string(ScheduleMode m) { return m == ScheduleMode::RoundRobin ? "round_robin" : "random"; }

struct Variants {
  bool detector_bound_checks = false;
  std::optional<std::size_t> node_bound;  // defaults to the node count
  bool halt_on_detect = false;
  bool terminating_detector = false;
  bool termination_filters = false;
  bool forward_each_distinct_path = false;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t max_steps = 1'000'000;
  Variants variants;
  ScheduleMode schedule = ScheduleMode::RoundRobin;
  bool audit = false;
  /// Random mode: an event enabled this many consecutive steps is forced.
  /// 0 means the size of the event universe.
  std::size_t fairness_window = 0;
};

enum class EventKind { Init, Deliver, Adversary };

struct Event {
  EventKind kind = EventKind::Init;
  NodeId node;  // acting process (receiver for deliveries)
  NodeId from;  // sender, deliveries only
  friend bool operator==(const Event&, const Event&) = default;
};

inline std::string to_string(const Event& e) {
  switch (e.kind) {
    case EventKind::Init: return "init(" + e.node.str() + ")";
    case EventKind::Deliver: return "deliver(" + e.from.str() + "->" + e.node.str() + ")";
    case EventKind::Adversary: return "adversary(" + e.node.str() + ")";
  }
  return "?";
}

using NodeProcess = std::variant<DetectorState, ExplorerState, ComposedState>;
using ChannelKey = std::pair<NodeId, NodeId>;

struct Counters {
  // sends by non-faulty processes
  std::size_t detector_sent = 0;
  std::size_t explorer_sent = 0;
  std::size_t announcements_sent = 0;
  std::size_t identifier_units = 0;
  std::size_t max_message_units = 0;
  // Byzantine traffic
  std::size_t adversary_emitted = 0;
  std::size_t adversary_rejected = 0;
  std::size_t absorbed_by_faulty = 0;
  // fate of messages taken off channels into non-faulty processes
  std::size_t consumed = 0;
  std::size_t processed = 0;
  std::size_t discarded_halted = 0;
  std::size_t filtered = 0;
  std::size_t ignored = 0;
  std::size_t rejected_syntax = 0;

  std::size_t protocol_sent() const { return detector_sent + explorer_sent + announcements_sent; }
};

/// Proof-only state: never consulted by protocol logic.
struct Ghost {
  std::map<ChannelKey, std::vector<ProtocolMessage>> sent;
  std::map<ChannelKey, std::vector<ProtocolMessage>> consumed;
  // Explorer messages handed to explorer_accept, as stored: (record, V + sender)
  std::map<NodeId, std::set<std::pair<NeighborhoodRecord, NodeSet>>> accepted;
  std::map<NodeId, std::vector<std::pair<NeighborhoodRecord, NodeSet>>> accepted_log;
  std::map<NodeId, std::size_t> explorer_consumed;
  std::map<NodeId, std::size_t> explorer_accepted;
  std::map<NodeId, std::size_t> explorer_discarded;
  // source -> non-faulty processes holding its true record (the COR set)
  std::map<NodeId, NodeSet> cor;
  // last audited confirmed view per process
  std::map<NodeId, ExploredView> confirmed;
};

// Progress of the focused per-step audit through the append-only ghost logs,
// so each step only examines what was appended since the last one.
struct AuditCursors {
  std::map<ChannelKey, std::size_t> conserved;
  std::map<ChannelKey, std::size_t> sent_scanned;
  std::map<ChannelKey, std::set<ExplorerMsg>> explorer_out;
  std::map<NodeId, std::size_t> accepted_scanned;
};

struct AuditState {
  bool enabled = false;
  std::size_t checks = 0;
  std::optional<std::string> first_violation;
  AuditCursors cursors;
};

struct SimWorld {
  Topology ground_truth;
  std::size_t k = 1;
  Algorithm algorithm = Algorithm::Detector;
  NodeSet faulty;
  AdversaryStrategy strategy;
  MessageForm adversary_form = MessageForm::Detector;
  SimConfig config;

  std::vector<NodeId> nodes;
  std::map<NodeId, NodeProcess> processes;
  std::map<NodeId, TerminationFilters> filters;
  std::map<ChannelKey, std::deque<ProtocolMessage>> channels;
  std::map<NodeId, AdversaryCursor> cursors;
  std::map<NodeId, std::vector<ObservedMessage>> observed;

  std::vector<Event> universe;
  std::size_t rotation = 0;
  std::vector<std::optional<std::size_t>> enabled_since;
  std::mt19937_64 rng;
  std::size_t step = 0;

  std::size_t connectivity = 0;
  std::vector<std::string> warnings;
  Counters counters;
  Ghost ghost;
  AuditState audit;

  bool is_faulty(const NodeId& u) const { return faulty.contains(u); }
  std::size_t required_connectivity() const { return algorithm == Algorithm::Detector ? k + 1 : 2 * k + 1; }
};

/// Detector half of a process, if it has one.
inline const DetectorState* detector_part(const NodeProcess& p) {
  if (const auto* d = std::get_if<DetectorState>(&p)) return d;
  if (const auto* c = std::get_if<ComposedState>(&p)) return &c->detector_state;
  return nullptr;
}

inline const ExplorerState* explorer_part(const NodeProcess& p) {
  if (const auto* e = std::get_if<ExplorerState>(&p)) return e;
  if (const auto* c = std::get_if<ComposedState>(&p)) return &c->explorer_state;
  return nullptr;
}

inline bool in_explorer_mode(const NodeProcess& p) {
  if (std::holds_alternative<ExplorerState>(p)) return true;
  if (const auto* c = std::get_if<ComposedState>(&p)) return c->mode == ComposedMode::Explorer;
  return false;
}

/// The view a process currently reports as its discovered topology.
inline const ExploredView& discovered_view(const NodeProcess& p) {
  if (in_explorer_mode(p)) return explorer_part(p)->ctop;
  return detector_part(p)->top;
}

}  // namespace byztopo
