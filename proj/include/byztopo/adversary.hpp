#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "byztopo/messages.hpp"
#include "byztopo/topology.hpp"

namespace byztopo {

enum class AdversaryKind { Silent, FakeNodes, Divergent, Replay, ForgedVisited, Script };
enum class MessageForm { Auto, Detector, Explorer };

struct ScriptEntry {
  std::size_t step = 0;  // earliest world step at which the entry may fire
  NodeId from;
  NodeId to;
  ProtocolMessage message;
};

/// A Byzantine behavior. It replaces the faulty node entirely: the node runs
/// no protocol actions, it only emits what the strategy produces, and never
/// more than `budget` messages.
struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::Silent;
  std::size_t budget = 256;
  MessageForm form = MessageForm::Auto;
  std::size_t rounds = 1;

  // fake_nodes
  std::size_t fake_count = 1;
  std::string fake_prefix = "f";

  // divergent
  std::optional<NodeId> target;
  std::vector<NodeSet> alternatives;

  // forged_visited
  std::optional<NeighborhoodRecord> forged_record;
  std::vector<NodeSet> forged_visited;
  std::size_t forged_count = 3;

  // script
  std::vector<ScriptEntry> script;
};

struct ObservedMessage {
  NodeId from;
  ProtocolMessage message;
};

/// Per-faulty-node emission progress.
struct AdversaryCursor {
  std::size_t emitted = 0;
  std::size_t burst = 0;
  std::size_t replayed = 0;
  std::size_t script_pos = 0;
};

/// What a faulty node knows when it acts. `ground_truth` is used only to
/// size default divergent/forged neighborhoods; strategies never see other
/// processes' private state.
struct AdversaryContext {
  NodeId faulty;
  const Topology* ground_truth = nullptr;
  std::span<const ObservedMessage> observed;
  std::size_t step = 0;
  std::uint64_t seed = 0;
  MessageForm form = MessageForm::Detector;  // resolved, never Auto
  bool others_enabled = true;
};

inline NodeId fake_id(const AdversaryStrategy& s, std::size_t i) { return NodeId(s.fake_prefix + std::to_string(i + 1)); }

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

inline ProtocolMessage shaped(const NeighborhoodRecord& rec, const NodeSet& visited, MessageForm form) {
  if (form == MessageForm::Explorer) return ExplorerMsg{rec, visited};
  return DetectorMsg{rec};
}

inline std::size_t planned_bursts(const AdversaryStrategy& s) {
  switch (s.kind) {
    case AdversaryKind::FakeNodes: return s.fake_count * s.rounds;
    case AdversaryKind::Divergent: return s.rounds;
    case AdversaryKind::ForgedVisited:
      return (s.forged_visited.empty() ? s.forged_count : s.forged_visited.size()) * s.rounds;
    default: return 0;
  }
}

inline NodeSet without_one(const NodeSet& base, std::size_t skip_index) {
  NodeSet out;
  std::size_t i = 0;
  for (const auto& v : base)
    if (i++ != skip_index) out.insert(v);
  return out;
}

inline std::vector<NodeSet> divergent_neighborhoods(const AdversaryStrategy& s, const AdversaryContext& ctx,
                                                    const NodeId& target, std::size_t recipients) {
  if (!s.alternatives.empty()) return s.alternatives;
  const NodeSet truth = ctx.ground_truth->has_node(target) ? ctx.ground_truth->neighbors(target) : NodeSet{};
  std::vector<NodeSet> alts;
  if (truth.size() >= 2) {
    // recipient i hears the true neighborhood minus its member counted i-th
    // from the top, so the first two recipients always disagree
    for (std::size_t i = 0; i < std::max<std::size_t>(recipients, 2); ++i)
      alts.push_back(without_one(truth, truth.size() - 1 - i % truth.size()));
  } else {
    NodeSet a = truth, b = truth;
    a.insert(NodeId(s.fake_prefix + "x1"));
    b.insert(NodeId(s.fake_prefix + "x2"));
    alts = {a, b};
  }
  return alts;
}

inline NeighborhoodRecord default_forged_record(const AdversaryContext& ctx) {
  const auto& mine = ctx.ground_truth->neighbors(ctx.faulty);
  const NodeId target = mine.empty() ? ctx.faulty : *mine.begin();
  // claim that target's only neighbor is the faulty node
  return {target, NodeSet{ctx.faulty}};
}

inline NodeSet forged_visited_set(const AdversaryContext& ctx, std::size_t index) {
  std::mt19937_64 rng(splitmix64(ctx.seed ^ fnv1a(ctx.faulty.str())) + index);
  NodeSet out;
  for (const auto& v : ctx.ground_truth->nodes())
    if (rng() & 1U) out.insert(v);
  return out;
}

inline std::vector<Send<ProtocolMessage>> planned_burst(const AdversaryStrategy& s, const AdversaryContext& ctx,
                                                        std::size_t burst) {
  const auto& nb = ctx.ground_truth->neighbors(ctx.faulty);
  std::vector<Send<ProtocolMessage>> out;
  switch (s.kind) {
    case AdversaryKind::FakeNodes: {
      // fakes form a chain hanging off the faulty node
      const std::size_t i = burst % s.fake_count;
      NodeSet fake_nb{ctx.faulty};
      if (i > 0) fake_nb.insert(fake_id(s, i - 1));
      if (i + 1 < s.fake_count) fake_nb.insert(fake_id(s, i + 1));
      const auto msg = shaped({fake_id(s, i), fake_nb}, {}, ctx.form);
      for (const auto& to : nb) out.push_back({to, msg});
      break;
    }
    case AdversaryKind::Divergent: {
      const NodeId target = s.target.value_or(ctx.faulty);
      const auto alts = divergent_neighborhoods(s, ctx, target, nb.size());
      std::size_t i = 0;
      for (const auto& to : nb) {
        NeighborhoodRecord rec{target, alts[i++ % alts.size()]};
        rec.neighbors.erase(target);
        out.push_back({to, shaped(rec, {}, ctx.form)});
      }
      break;
    }
    case AdversaryKind::ForgedVisited: {
      const auto rec = s.forged_record.value_or(default_forged_record(ctx));
      const std::size_t sets = s.forged_visited.empty() ? s.forged_count : s.forged_visited.size();
      const std::size_t j = burst % sets;
      const NodeSet visited = s.forged_visited.empty() ? forged_visited_set(ctx, j) : s.forged_visited[j];
      const auto msg = shaped(rec, visited, ctx.form);
      for (const auto& to : nb) out.push_back({to, msg});
      break;
    }
    default: break;
  }
  return out;
}

inline const ScriptEntry* next_script_entry(const AdversaryStrategy& s, const NodeId& faulty, std::size_t pos,
                                            std::size_t* index = nullptr) {
  for (std::size_t i = pos; i < s.script.size(); ++i) {
    if (s.script[i].from == faulty) {
      if (index != nullptr) *index = i;
      return &s.script[i];
    }
  }
  return nullptr;
}

}  // namespace detail

/// Whether the faulty node has an emission opportunity right now.
inline bool adversary_ready(const AdversaryStrategy& s, const AdversaryContext& ctx, const AdversaryCursor& cur) {
  if (cur.emitted >= s.budget) return false;
  switch (s.kind) {
    case AdversaryKind::Silent: return false;
    case AdversaryKind::Replay: return cur.replayed < ctx.observed.size();
    case AdversaryKind::Script: {
      const auto* e = detail::next_script_entry(s, ctx.faulty, cur.script_pos);
      return e != nullptr && (e->step <= ctx.step || !ctx.others_enabled);
    }
    default: return cur.burst < detail::planned_bursts(s);
  }
}

/// Emits the next burst and advances the cursor. Output is a pure function
/// of (strategy, context, cursor) and is truncated to the remaining budget.
inline std::vector<Send<ProtocolMessage>> adversary_emit(const AdversaryStrategy& s, const AdversaryContext& ctx,
                                                         AdversaryCursor& cur) {
  if (!adversary_ready(s, ctx, cur)) return {};
  std::vector<Send<ProtocolMessage>> out;
  switch (s.kind) {
    case AdversaryKind::Silent: break;
    case AdversaryKind::Replay: {
      const auto& obs = ctx.observed[cur.replayed++];
      for (const auto& to : ctx.ground_truth->neighbors(ctx.faulty)) out.push_back({to, obs.message});
      break;
    }
    case AdversaryKind::Script: {
      std::size_t idx = 0;
      const auto* e = detail::next_script_entry(s, ctx.faulty, cur.script_pos, &idx);
      out.push_back({e->to, e->message});
      cur.script_pos = idx + 1;
      break;
    }
    default: out = detail::planned_burst(s, ctx, cur.burst++); break;
  }
  const std::size_t room = s.budget - cur.emitted;
  if (out.size() > room) out.resize(room);
  cur.emitted += out.size();
  return out;
}

}  // namespace byztopo
