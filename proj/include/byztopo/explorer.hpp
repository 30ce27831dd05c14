#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "byztopo/explored_view.hpp"
#include "byztopo/messages.hpp"

namespace byztopo {

struct ExplorerOptions {
  /// Relay every distinct (r,R,S') once instead of only the first arrival
  /// of (r,R).
  bool forward_each_distinct_path = false;
};

struct ExplorerState {
  NodeId self;
  NodeSet neighbors;
  std::size_t k = 1;
  bool start = true;
  ExploredView ctop;
  /// Unconfirmed records: every visited set received for each (r,R).
  std::map<NeighborhoodRecord, std::set<NodeSet>> utop;
  /// Ghost mirror of everything this process has sent; never read by the
  /// protocol itself.
  std::set<ExplorerMsg> sent_log;
  std::set<NeighborhoodRecord> forwarded_keys;
  /// Visited sets already relayed, used only with forward_each_distinct_path.
  std::set<ExplorerMsg> forwarded_paths;
  ExplorerOptions options;

  static ExplorerState initial(NodeId self, NodeSet neighbors, std::size_t k, ExplorerOptions options = {}) {
    ExplorerState s;
    s.self = std::move(self);
    s.neighbors = std::move(neighbors);
    s.k = k;
    s.ctop = ExploredView(NeighborhoodRecord{s.self, s.neighbors});
    s.options = options;
    return s;
  }

  std::size_t utop_size() const {
    std::size_t n = 0;
    for (const auto& [_, sets] : utop) n += sets.size();
    return n;
  }
};

using ExplorerTransition = Transition<ExplorerState, ExplorerMsg>;

namespace detail {

inline bool pick_witnesses(const std::vector<const NodeSet*>& candidates, std::size_t from, std::size_t needed,
                           std::vector<const NodeSet*>& chosen, const NodeId& source) {
  if (needed == 0) return true;
  for (std::size_t i = from; i + needed <= candidates.size(); ++i) {
    bool fits = true;
    for (const auto* c : chosen)
      if (!intersection_within(*c, *candidates[i], source)) {
        fits = false;
        break;
      }
    if (!fits) continue;
    chosen.push_back(candidates[i]);
    if (pick_witnesses(candidates, i + 1, needed - 1, chosen, source)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace detail

/// True iff k+1 visited sets, one of them `incoming`, pairwise intersect in
/// a subset of {source}. Exact backtracking search over the stored sets.
inline bool confirmable(const std::set<NodeSet>& entries, const NodeSet& incoming, std::size_t k, const NodeId& source) {
  std::vector<const NodeSet*> candidates;
  for (const auto& e : entries)
    if (intersection_within(e, incoming, source)) candidates.push_back(&e);
  if (candidates.size() < k) return false;
  std::vector<const NodeSet*> chosen{&incoming};
  return detail::pick_witnesses(candidates, 0, k, chosen, source);
}

inline ExplorerTransition explorer_init(ExplorerState state) {
  if (!state.start) return {std::move(state), {}};
  state.start = false;
  ExplorerMsg own{{state.self, state.neighbors}, {}};
  state.sent_log.insert(own);
  auto sends = broadcast(state.neighbors, own);
  return {std::move(state), std::move(sends)};
}

/// Fig-2 accept generalized to k faults.
inline ExplorerTransition explorer_accept(ExplorerState state, const NodeId& sender, const ExplorerMsg& msg) {
  if (!state.neighbors.contains(sender))
    throw std::logic_error("explorer_accept: " + sender.str() + " is not a neighbor of " + state.self.str());

  const auto& rec = msg.record;
  NodeSet relayed = msg.visited;
  relayed.insert(sender);

  std::vector<Send<ExplorerMsg>> sends;
  auto emit = [&](ExplorerMsg out) {
    state.sent_log.insert(out);
    auto b = broadcast(state.neighbors, out);
    sends.insert(sends.end(), b.begin(), b.end());
  };

  if (!state.ctop.contains(rec.node)) {
    auto stored = state.utop.find(rec);
    const bool first_arrival = stored == state.utop.end() && !state.forwarded_keys.contains(rec);

    if (!state.options.forward_each_distinct_path) {
      if (first_arrival) {
        state.forwarded_keys.insert(rec);
        emit({rec, relayed});
      } else if (stored != state.utop.end() && confirmable(stored->second, relayed, state.k, rec.node)) {
        state.ctop.insert(rec);
        emit({rec, {}});
      }
    } else {
      if (stored != state.utop.end() && confirmable(stored->second, relayed, state.k, rec.node)) {
        state.ctop.insert(rec);
        emit({rec, {}});
      } else if (state.forwarded_paths.insert({rec, relayed}).second) {
        state.forwarded_keys.insert(rec);
        emit({rec, relayed});
      }
    }
  }
  state.utop[rec].insert(std::move(relayed));
  return {std::move(state), std::move(sends)};
}

}  // namespace byztopo
