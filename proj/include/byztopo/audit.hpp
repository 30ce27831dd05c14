#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "byztopo/world.hpp"

namespace byztopo {

// Ghost-state invariant checks. Each check takes an optional focus set:
// only predicates that mention a focused process are evaluated. The step
// function passes the processes touched by the last event, which is enough
// to catch a violation at the step it appears; the full check (no focus)
// runs at the start and end of every audited run.

namespace detail {

inline bool focused(const NodeSet* focus, const NodeId& a, const NodeId& b) {
  return focus == nullptr || focus->contains(a) || focus->contains(b);
}

inline bool channel_holds(const SimWorld& w, const NodeId& from, const NodeId& to, const ProtocolMessage& m) {
  auto it = w.channels.find({from, to});
  return it != w.channels.end() && std::find(it->second.begin(), it->second.end(), m) != it->second.end();
}

}  // namespace detail

/// COR for source a: non-faulty b holding a's true record, plus a itself
/// once it has executed init.
inline NodeSet compute_cor(const SimWorld& w, const NodeId& a) {
  NodeSet cor;
  const auto truth = w.ground_truth.record(a);
  for (const auto& b : w.nodes) {
    if (w.is_faulty(b)) continue;
    const auto* d = detector_part(w.processes.at(b));
    if (d == nullptr) continue;
    if (b == a ? !d->start : d->top.holds(truth)) cor.insert(b);
  }
  return cor;
}

/// Detector channel invariant: unless some non-faulty process knows of a
/// fault, every non-faulty neighbor c of a COR member b is in COR or has
/// (a,A) in flight on Ch.b.c. "Knows of a fault" covers detect, halting on
/// an announcement, and (composed runs) having left Detector mode.
inline std::optional<std::string> check_detector_invariant(const SimWorld& w, const NodeSet* focus = nullptr) {
  if (w.algorithm == Algorithm::Explorer) return std::nullopt;
  for (const auto& j : w.nodes) {
    if (w.is_faulty(j)) continue;
    const auto& p = w.processes.at(j);
    const auto* d = detector_part(p);
    if (d->detect || d->halted || in_explorer_mode(p)) return std::nullopt;
  }
  for (const auto& a : w.nodes) {
    if (w.is_faulty(a)) continue;
    const auto cor = compute_cor(w, a);
    const ProtocolMessage carried = DetectorMsg{w.ground_truth.record(a)};
    for (const auto& b : cor) {
      for (const auto& c : w.ground_truth.neighbors(b)) {
        if (w.is_faulty(c) || cor.contains(c) || !detail::focused(focus, b, c)) continue;
        if (!detail::channel_holds(w, b, c, carried))
          return "detector invariant: source " + a.str() + ", " + b.str() + " in COR but neighbor " + c.str() +
                 " is not and Ch." + b.str() + "." + c.str() + " lacks " + to_string(carried);
      }
    }
  }
  return std::nullopt;
}

/// FIFO / no loss: everything sent on Ch.b.c (c non-faulty) is exactly what
/// c consumed followed by what is still queued. With cursors, the consumed
/// prefix verified at earlier steps is not compared again.
inline std::optional<std::string> check_channel_conservation(const SimWorld& w, const NodeSet* focus = nullptr,
                                                             AuditCursors* cursors = nullptr) {
  static const std::vector<ProtocolMessage> none;
  for (const auto& [key, queue] : w.channels) {
    const auto& [b, c] = key;
    if (w.is_faulty(c) || !detail::focused(focus, b, c)) continue;
    auto s = w.ghost.sent.find(key);
    auto r = w.ghost.consumed.find(key);
    const auto& sent = s == w.ghost.sent.end() ? none : s->second;
    const auto& consumed = r == w.ghost.consumed.end() ? none : r->second;
    std::size_t from = 0;
    if (cursors != nullptr) from = std::min(cursors->conserved[key], consumed.size());
    const auto at = [](const auto& v, std::size_t i) { return v.begin() + static_cast<std::ptrdiff_t>(i); };
    const bool ok = sent.size() == consumed.size() + queue.size() &&
                    std::equal(at(consumed, from), consumed.end(), at(sent, from)) &&
                    std::equal(queue.begin(), queue.end(), at(sent, consumed.size()));
    if (!ok) return "channel conservation: Ch." + b.str() + "." + c.str() + " does not match its sent log";
    if (cursors != nullptr) cursors->conserved[key] = consumed.size();
  }
  return std::nullopt;
}

/// Explorer SENT/uTOP correspondence: for non-faulty c, uTOP.c is exactly
/// {(a,A',V+b) : (a,A',V) consumed from b and handed to accept}, every
/// consumed Explorer message is either accepted or explicitly discarded,
/// and each non-faulty sender's SENT equals what went out on each of its
/// channels. Together with channel conservation this is the per-channel
/// form of the (a,A',V) in SENT.b <=> in Ch.b.c or in uTOP.c predicate.
/// With cursors, set equalities are checked as "new entries are members"
/// plus equal sizes; the full check at the end of a run compares sets.
inline std::optional<std::string> check_explorer_invariant(const SimWorld& w, const NodeSet* focus = nullptr,
                                                           AuditCursors* cursors = nullptr) {
  if (w.algorithm == Algorithm::Detector) return std::nullopt;
  static const std::vector<std::pair<NeighborhoodRecord, NodeSet>> no_log;
  static const std::vector<ProtocolMessage> none;
  for (const auto& c : w.nodes) {
    if (w.is_faulty(c) || (focus != nullptr && !focus->contains(c))) continue;
    const auto* e = explorer_part(w.processes.at(c));
    const std::string utop_mismatch = "explorer invariant: uTOP." + c.str() + " differs from the messages it accepted";

    auto acc = w.ghost.accepted.find(c);
    const std::size_t accepted_size = acc == w.ghost.accepted.end() ? 0 : acc->second.size();
    if (cursors == nullptr) {
      std::set<std::pair<NeighborhoodRecord, NodeSet>> stored;
      for (const auto& [rec, sets] : e->utop)
        for (const auto& v : sets) stored.emplace(rec, v);
      if (accepted_size == 0 ? !stored.empty() : stored != acc->second) return utop_mismatch;
    } else {
      std::size_t stored = 0;
      for (const auto& [rec, sets] : e->utop) stored += sets.size();
      if (stored != accepted_size) return utop_mismatch;
      auto lg = w.ghost.accepted_log.find(c);
      const auto& log = lg == w.ghost.accepted_log.end() ? no_log : lg->second;
      auto& seen = cursors->accepted_scanned[c];
      for (; seen < log.size(); ++seen) {
        auto it = e->utop.find(log[seen].first);
        if (it == e->utop.end() || !it->second.contains(log[seen].second)) return utop_mismatch;
      }
    }

    auto count = [](const std::map<NodeId, std::size_t>& m, const NodeId& u) {
      auto it = m.find(u);
      return it == m.end() ? std::size_t{0} : it->second;
    };
    if (count(w.ghost.explorer_consumed, c) != count(w.ghost.explorer_accepted, c) + count(w.ghost.explorer_discarded, c))
      return "explorer invariant: " + c.str() + " consumed an Explorer message without storing or discarding it";

    for (const auto& nb : w.ground_truth.neighbors(c)) {
      const ChannelKey key{c, nb};
      auto s = w.ghost.sent.find(key);
      const auto& sent = s == w.ghost.sent.end() ? none : s->second;
      const std::string sent_mismatch = "explorer invariant: SENT." + c.str() + " differs from Ch." + c.str() + "." + nb.str();
      if (cursors == nullptr) {
        std::set<ExplorerMsg> out;
        for (const auto& m : sent)
          if (const auto* em = std::get_if<ExplorerMsg>(&m)) out.insert(*em);
        if (out != e->sent_log) return sent_mismatch;
      } else {
        auto& out = cursors->explorer_out[key];
        auto& scanned = cursors->sent_scanned[key];
        for (; scanned < sent.size(); ++scanned)
          if (const auto* em = std::get_if<ExplorerMsg>(&sent[scanned])) {
            if (!e->sent_log.contains(*em)) return sent_mismatch;
            out.insert(*em);
          }
        if (out.size() != e->sent_log.size()) return sent_mismatch;
      }
    }

    if (auto prev = w.ghost.confirmed.find(c); prev != w.ghost.confirmed.end())
      for (const auto& [u, nb] : prev->second.records())
        if (!e->ctop.holds({u, nb}))
          return "explorer invariant: confirmed record of " + u.str() + " changed at " + c.str();
  }
  return std::nullopt;
}

inline std::optional<std::string> check_all_invariants(const SimWorld& w, const NodeSet* focus = nullptr,
                                                       AuditCursors* cursors = nullptr) {
  if (auto v = check_channel_conservation(w, focus, cursors)) return v;
  if (auto v = check_detector_invariant(w, focus)) return v;
  if (auto v = check_explorer_invariant(w, focus, cursors)) return v;
  return std::nullopt;
}

/// Runs the checks and records the first violation; also snapshots the
/// confirmed views used by the monotonicity check.
inline void audit_world(SimWorld& w, const NodeSet* focus = nullptr) {
  if (!w.audit.enabled) return;
  ++w.audit.checks;
  if (!w.audit.first_violation) {
    AuditCursors* cursors = focus == nullptr ? nullptr : &w.audit.cursors;
    if (auto v = check_all_invariants(w, focus, cursors)) w.audit.first_violation = "step " + std::to_string(w.step) + ": " + *v;
  }
  if (w.algorithm != Algorithm::Detector) {
    for (const auto& c : w.nodes) {
      if (w.is_faulty(c) || (focus != nullptr && !focus->contains(c))) continue;
      w.ghost.confirmed[c] = explorer_part(w.processes.at(c))->ctop;
    }
  }
}

}  // namespace byztopo
