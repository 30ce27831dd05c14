#pragma once

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "byztopo/audit.hpp"
#include "byztopo/connectivity.hpp"
#include "byztopo/world.hpp"

namespace byztopo {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool audit_forced_by_env() {
  const char* v = std::getenv("BYZTOPO_AUDIT");
  return v != nullptr && std::string(v) == "1";
}

inline MessageForm resolve_form(MessageForm requested, Algorithm algorithm) {
  if (requested != MessageForm::Auto) return requested;
  return algorithm == Algorithm::Explorer ? MessageForm::Explorer : MessageForm::Detector;
}

/// Builds the initial world. Connectivity below the algorithm's requirement
/// is only a warning so that negative experiments stay possible.
inline SimWorld make_world(Topology topology, std::size_t k, Algorithm algorithm, NodeSet faulty,
                           AdversaryStrategy strategy, SimConfig config) {
  if (auto v = validate_topology(topology)) throw SimulationError("invalid topology: " + *v);
  if (topology.node_count() < 2) throw SimulationError("topology needs at least two nodes");
  if (k < 1) throw SimulationError("k must be at least 1");
  if (faulty.size() > k)
    throw SimulationError("|faulty| = " + std::to_string(faulty.size()) + " exceeds k = " + std::to_string(k));
  for (const auto& f : faulty)
    if (!topology.has_node(f)) throw SimulationError("faulty node " + f.str() + " is not in the topology");
  if (algorithm == Algorithm::Composed && config.variants.terminating_detector)
    throw SimulationError("terminating_detector does not apply to composed runs (detection switches to Explorer)");
  if (strategy.kind == AdversaryKind::FakeNodes)
    for (std::size_t i = 0; i < strategy.fake_count; ++i)
      if (topology.has_node(fake_id(strategy, i)))
        throw SimulationError("fake id " + fake_id(strategy, i).str() + " collides with a real node");
  for (const auto& e : strategy.script) {
    if (!faulty.contains(e.from)) throw SimulationError("script entry sent by non-faulty node " + e.from.str());
  }

  SimWorld w;
  w.k = k;
  w.algorithm = algorithm;
  w.faulty = std::move(faulty);
  w.adversary_form = resolve_form(strategy.form, algorithm);
  w.strategy = std::move(strategy);
  w.config = config;
  if (audit_forced_by_env()) w.config.audit = true;
  w.audit.enabled = w.config.audit;
  w.rng.seed(config.seed);
  w.nodes = topology.nodes();
  w.ground_truth = std::move(topology);

  w.connectivity = vertex_connectivity(w.ground_truth);
  if (w.connectivity < w.required_connectivity())
    w.warnings.push_back("connectivity " + std::to_string(w.connectivity) + " is below the " +
                         std::to_string(w.required_connectivity()) + " required by " + to_string(algorithm) +
                         " for k = " + std::to_string(k));

  const auto& v = w.config.variants;
  DetectorOptions dopt{v.detector_bound_checks, v.node_bound.value_or(w.nodes.size()),
                       v.halt_on_detect || v.terminating_detector};
  ExplorerOptions eopt{v.forward_each_distinct_path};

  for (const auto& u : w.nodes) {
    const auto& nb = w.ground_truth.neighbors(u);
    switch (algorithm) {
      case Algorithm::Detector: w.processes.emplace(u, DetectorState::initial(u, nb, k, dopt)); break;
      case Algorithm::Explorer: w.processes.emplace(u, ExplorerState::initial(u, nb, k, eopt)); break;
      case Algorithm::Composed: w.processes.emplace(u, ComposedState::initial(u, nb, k, dopt, eopt)); break;
    }
    if (v.termination_filters && algorithm != Algorithm::Detector) w.filters.emplace(u, TerminationFilters::for_k(k));
  }

  for (const auto& u : w.nodes) w.universe.push_back({EventKind::Init, u, {}});
  for (const auto& u : w.nodes)
    for (const auto& nb : w.ground_truth.neighbors(u)) {
      w.channels[{u, nb}];
      w.universe.push_back({EventKind::Deliver, nb, u});
    }
  // deliveries sorted by (sender, receiver)
  std::stable_sort(w.universe.begin() + static_cast<std::ptrdiff_t>(w.nodes.size()), w.universe.end(),
                   [](const Event& a, const Event& b) { return std::tie(a.from, a.node) < std::tie(b.from, b.node); });
  for (const auto& f : w.faulty) {
    w.universe.push_back({EventKind::Adversary, f, {}});
    w.cursors[f];
    w.observed[f];
  }
  w.enabled_since.assign(w.universe.size(), std::nullopt);

  for (const auto& a : w.nodes)
    if (!w.is_faulty(a) && algorithm != Algorithm::Explorer) w.ghost.cor[a] = compute_cor(w, a);
  audit_world(w);
  return w;
}

namespace detail {

inline bool init_pending(const NodeProcess& p) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ComposedState>) {
          return s.mode == ComposedMode::Detector && s.detector_state.start && !s.detector_state.halted;
        } else if constexpr (std::is_same_v<T, DetectorState>) {
          // a process halted before its init never takes that step
          return s.start && !s.halted;
        } else {
          return s.start;
        }
      },
      p);
}

inline AdversaryContext adversary_context(const SimWorld& w, const NodeId& f, bool others_enabled) {
  const auto& obs = w.observed.at(f);
  return {f, &w.ground_truth, std::span<const ObservedMessage>(obs.data(), obs.size()), w.step, w.config.seed,
          w.adversary_form, others_enabled};
}

inline std::vector<bool> enabled_mask(const SimWorld& w) {
  std::vector<bool> mask(w.universe.size(), false);
  bool others = false;
  for (std::size_t i = 0; i < w.universe.size(); ++i) {
    const auto& e = w.universe[i];
    if (e.kind == EventKind::Init) {
      mask[i] = !w.is_faulty(e.node) && init_pending(w.processes.at(e.node));
    } else if (e.kind == EventKind::Deliver) {
      mask[i] = !w.is_faulty(e.node) && !w.channels.at({e.from, e.node}).empty();
    }
    others = others || mask[i];
  }
  for (std::size_t i = 0; i < w.universe.size(); ++i) {
    const auto& e = w.universe[i];
    if (e.kind == EventKind::Adversary)
      mask[i] = adversary_ready(w.strategy, adversary_context(w, e.node, others), w.cursors.at(e.node));
  }
  return mask;
}

}  // namespace detail

/// Enabled events in canonical order: inits by node id, deliveries by
/// (sender, receiver), then adversary opportunities.
inline std::vector<Event> enabled_events(const SimWorld& w) {
  const auto mask = detail::enabled_mask(w);
  std::vector<Event> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(w.universe[i]);
  return out;
}

inline bool quiescent(const SimWorld& w) { return enabled_events(w).empty(); }

namespace detail {

inline void enqueue(SimWorld& w, const NodeId& from, const NodeId& to, ProtocolMessage msg, bool byzantine) {
  if (!w.ground_truth.has_edge(from, to)) {
    if (byzantine) {
      ++w.counters.adversary_rejected;
      return;
    }
    throw SimulationError("process " + from.str() + " sent to non-neighbor " + to.str());
  }
  if (byzantine) {
    ++w.counters.adversary_emitted;
  } else {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, DetectorMsg>) ++w.counters.detector_sent;
          else if constexpr (std::is_same_v<T, ExplorerMsg>) ++w.counters.explorer_sent;
          else ++w.counters.announcements_sent;
        },
        msg);
    const auto units = identifier_units(msg);
    w.counters.identifier_units += units;
    w.counters.max_message_units = std::max(w.counters.max_message_units, units);
  }
  w.ghost.sent[{from, to}].push_back(msg);
  if (w.is_faulty(to)) {
    ++w.counters.absorbed_by_faulty;
    w.observed[to].push_back({from, std::move(msg)});
    return;
  }
  w.channels.at({from, to}).push_back(std::move(msg));
}

template <class Msg>
void route(SimWorld& w, const NodeId& from, std::vector<Send<Msg>>&& sends) {
  for (auto& s : sends) enqueue(w, from, s.to, ProtocolMessage{std::move(s.message)}, false);
}

inline void fire_init(SimWorld& w, const NodeId& u) {
  auto& proc = w.processes.at(u);
  if (auto* d = std::get_if<DetectorState>(&proc)) {
    auto t = detector_init(std::move(*d));
    *d = std::move(t.state);
    route(w, u, std::move(t.sends));
  } else if (auto* e = std::get_if<ExplorerState>(&proc)) {
    auto t = explorer_init(std::move(*e));
    *e = std::move(t.state);
    route(w, u, std::move(t.sends));
  } else {
    auto& c = std::get<ComposedState>(proc);
    auto t = composed_init(std::move(c));
    c = std::move(t.state);
    route(w, u, std::move(t.sends));
  }
}

inline void note_explorer_consumed(SimWorld& w, const NodeId& to, const ProtocolMessage& m) {
  if (std::holds_alternative<ExplorerMsg>(m)) ++w.ghost.explorer_consumed[to];
}

inline void note_explorer_discarded(SimWorld& w, const NodeId& to, const ProtocolMessage& m) {
  if (std::holds_alternative<ExplorerMsg>(m)) ++w.ghost.explorer_discarded[to];
}

inline void note_explorer_accepted(SimWorld& w, const NodeId& from, const NodeId& to, const ExplorerMsg& m) {
  NodeSet v = m.visited;
  v.insert(from);
  w.ghost.accepted[to].emplace(m.record, v);
  w.ghost.accepted_log[to].emplace_back(m.record, std::move(v));
  ++w.ghost.explorer_accepted[to];
}

inline void deliver_detector(SimWorld& w, DetectorState& d, const NodeId& from, const NodeId& to,
                             const ProtocolMessage& msg) {
  const bool terminating = w.config.variants.terminating_detector;
  if (const auto* m = std::get_if<DetectorMsg>(&msg)) {
    if (d.halted) {
      ++w.counters.discarded_halted;
      return;
    }
    ++w.counters.processed;
    const bool had_detected = d.detect;
    auto t = detector_accept(std::move(d), from, *m);
    d = std::move(t.state);
    route(w, to, std::move(t.sends));
    if (terminating && !had_detected && d.detect) {
      auto f = detector_start_flood(std::move(d));
      d = std::move(f.state);
      route(w, to, std::move(f.sends));
    }
  } else if (const auto* a = std::get_if<DetectAnnouncement>(&msg); a != nullptr && terminating) {
    ++w.counters.processed;
    auto t = detector_on_announcement(std::move(d), *a);
    d = std::move(t.state);
    route(w, to, std::move(t.sends));
  } else {
    ++w.counters.ignored;
  }
}

inline void deliver_explorer(SimWorld& w, ExplorerState& e, const NodeId& from, const NodeId& to,
                             const ProtocolMessage& msg) {
  const auto* m = std::get_if<ExplorerMsg>(&msg);
  if (m == nullptr) {
    ++w.counters.ignored;
    return;
  }
  if (auto f = w.filters.find(to); f != w.filters.end()) {
    if (apply_termination_filters(e, f->second, from, *m) == FilterVerdict::Discard) {
      ++w.counters.filtered;
      note_explorer_discarded(w, to, msg);
      return;
    }
  }
  ++w.counters.processed;
  auto t = explorer_accept(std::move(e), from, *m);
  e = std::move(t.state);
  note_explorer_accepted(w, from, to, *m);
  route(w, to, std::move(t.sends));
}

inline void deliver_composed(SimWorld& w, ComposedState& c, const NodeId& from, const NodeId& to,
                             const ProtocolMessage& msg) {
  auto f = w.filters.find(to);
  auto t = composed_accept(std::move(c), from, msg, f == w.filters.end() ? nullptr : &f->second);
  c = std::move(t.state);
  switch (t.disposition) {
    case ComposedDisposition::Processed: ++w.counters.processed; break;
    case ComposedDisposition::Ignored: ++w.counters.ignored; break;
    case ComposedDisposition::Filtered: ++w.counters.filtered; break;
  }
  if (t.explorer_accepted) note_explorer_accepted(w, from, to, std::get<ExplorerMsg>(msg));
  else note_explorer_discarded(w, to, msg);
  route(w, to, std::move(t.sends));
}

inline void fire_delivery(SimWorld& w, const NodeId& from, const NodeId& to) {
  auto& queue = w.channels.at({from, to});
  ProtocolMessage msg = std::move(queue.front());
  queue.pop_front();
  w.ghost.consumed[{from, to}].push_back(msg);
  ++w.counters.consumed;
  note_explorer_consumed(w, to, msg);

  if (syntax_violation(msg)) {
    ++w.counters.rejected_syntax;
    note_explorer_discarded(w, to, msg);
    return;
  }
  auto& proc = w.processes.at(to);
  if (auto* d = std::get_if<DetectorState>(&proc)) {
    deliver_detector(w, *d, from, to, msg);
    note_explorer_discarded(w, to, msg);
  } else if (auto* e = std::get_if<ExplorerState>(&proc)) {
    deliver_explorer(w, *e, from, to, msg);
  } else {
    deliver_composed(w, std::get<ComposedState>(proc), from, to, msg);
  }
}

inline void fire_adversary(SimWorld& w, const NodeId& f) {
  const auto ctx = adversary_context(w, f, true);
  auto sends = adversary_emit(w.strategy, ctx, w.cursors.at(f));
  for (auto& s : sends) enqueue(w, f, s.to, std::move(s.message), true);
}

inline void refresh_cor(SimWorld& w, const NodeId& touched) {
  if (w.algorithm == Algorithm::Explorer || w.is_faulty(touched)) return;
  const auto* d = detector_part(w.processes.at(touched));
  for (auto& [a, cor] : w.ghost.cor) {
    const bool member = touched == a ? !d->start : d->top.holds(w.ground_truth.record(a));
    if (member) cor.insert(touched);
    else cor.erase(touched);
  }
}

inline std::size_t choose_event(SimWorld& w, const std::vector<bool>& mask) {
  const std::size_t u = mask.size();
  if (w.config.schedule == ScheduleMode::RoundRobin) {
    for (std::size_t off = 0; off < u; ++off) {
      const std::size_t i = (w.rotation + off) % u;
      if (mask[i]) {
        w.rotation = (i + 1) % u;
        return i;
      }
    }
    throw SimulationError("step on a quiescent world");
  }

  std::vector<std::size_t> enabled;
  for (std::size_t i = 0; i < u; ++i) {
    if (mask[i]) {
      if (!w.enabled_since[i]) w.enabled_since[i] = w.step;
      enabled.push_back(i);
    } else {
      w.enabled_since[i].reset();
    }
  }
  if (enabled.empty()) throw SimulationError("step on a quiescent world");
  const std::size_t window = w.config.fairness_window == 0 ? u : w.config.fairness_window;
  std::size_t oldest = enabled.front();
  for (auto i : enabled)
    if (*w.enabled_since[i] < *w.enabled_since[oldest]) oldest = i;
  if (w.step - *w.enabled_since[oldest] >= window) return oldest;
  return enabled[w.rng() % enabled.size()];
}

}  // namespace detail

/// Fires one enabled event atomically (the transition and all its sends)
/// and returns it. Throws on a quiescent world.
inline Event step(SimWorld& w) {
  const auto mask = detail::enabled_mask(w);
  const auto index = detail::choose_event(w, mask);
  const Event ev = w.universe[index];
  if (w.config.schedule == ScheduleMode::Random) w.enabled_since[index].reset();

  NodeSet focus{ev.node};
  switch (ev.kind) {
    case EventKind::Init: detail::fire_init(w, ev.node); break;
    case EventKind::Deliver:
      detail::fire_delivery(w, ev.from, ev.node);
      focus.insert(ev.from);
      break;
    case EventKind::Adversary: detail::fire_adversary(w, ev.node); break;
  }
  ++w.step;
  detail::refresh_cor(w, ev.node);
  audit_world(w, &focus);
  return ev;
}

enum class Outcome { Quiescent, StepBudgetExhausted };

using StepObserver = std::function<void(const SimWorld&, const Event&)>;

/// Steps until quiescence or max_steps; returns the final world.
inline SimWorld simulate(SimWorld w, const StepObserver& observer = {}) {
  while (w.step < w.config.max_steps) {
    if (quiescent(w)) break;
    const auto ev = step(w);
    if (observer) observer(w, ev);
  }
  audit_world(w);
  return w;
}

inline Outcome outcome_of(const SimWorld& w) { return quiescent(w) ? Outcome::Quiescent : Outcome::StepBudgetExhausted; }

}  // namespace byztopo
