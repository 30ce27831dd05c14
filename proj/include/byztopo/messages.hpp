#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "byztopo/node_id.hpp"

namespace byztopo {

struct DetectorMsg {
  NeighborhoodRecord record;
  friend auto operator<=>(const DetectorMsg&, const DetectorMsg&) = default;
};

struct ExplorerMsg {
  NeighborhoodRecord record;
  NodeSet visited;
  friend auto operator<=>(const ExplorerMsg&, const ExplorerMsg&) = default;
};

/// Flooded by the terminating Detector once a fault is known.
struct DetectAnnouncement {
  NodeId origin;
  friend auto operator<=>(const DetectAnnouncement&, const DetectAnnouncement&) = default;
};

using ProtocolMessage = std::variant<DetectorMsg, ExplorerMsg, DetectAnnouncement>;

template <class Msg>
struct Send {
  NodeId to;
  Msg message;
  friend bool operator==(const Send&, const Send&) = default;
};

/// Result of a pure protocol transition: the successor state and the
/// messages it emits, in emission order.
template <class State, class Msg>
struct Transition {
  State state;
  std::vector<Send<Msg>> sends;
};

template <class Msg>
std::vector<Send<Msg>> broadcast(const NodeSet& recipients, const Msg& msg) {
  std::vector<Send<Msg>> out;
  out.reserve(recipients.size());
  for (const auto& to : recipients) out.push_back({to, msg});
  return out;
}

/// Format check applied at delivery. Byzantine senders may lie, but what
/// reaches a process always parses.
inline std::optional<std::string> syntax_violation(const ProtocolMessage& m) {
  return std::visit(
      [](const auto& msg) -> std::optional<std::string> {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, DetectAnnouncement>) {
          if (msg.origin.empty()) return "announcement without origin";
        } else {
          if (!msg.record.well_formed()) return "malformed record " + to_string(msg.record);
          for (const auto& v : msg.record.neighbors)
            if (v.empty()) return "empty neighbor id";
          if constexpr (std::is_same_v<T, ExplorerMsg>)
            for (const auto& v : msg.visited)
              if (v.empty()) return "empty visited id";
        }
        return std::nullopt;
      },
      m);
}

/// Message size in identifier units (one unit = one process id).
inline std::size_t identifier_units(const ProtocolMessage& m) {
  return std::visit(
      [](const auto& msg) -> std::size_t {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, DetectAnnouncement>) {
          return 1;
        } else if constexpr (std::is_same_v<T, DetectorMsg>) {
          return 1 + msg.record.neighbors.size();
        } else {
          return 1 + msg.record.neighbors.size() + msg.visited.size();
        }
      },
      m);
}

inline std::string to_string(const ProtocolMessage& m) {
  return std::visit(
      [](const auto& msg) -> std::string {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, DetectAnnouncement>) {
          return "detect!" + msg.origin.str();
        } else if constexpr (std::is_same_v<T, DetectorMsg>) {
          return "D" + to_string(msg.record);
        } else {
          return "E" + to_string(msg.record) + to_string(msg.visited);
        }
      },
      m);
}

}  // namespace byztopo
