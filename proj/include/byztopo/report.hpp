#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "byztopo/runtime.hpp"

namespace byztopo {

using Json = nlohmann::ordered_json;

struct NodeSummary {
  NodeId id;
  bool faulty = false;
  std::string mode;  // detector | explorer | byzantine
  bool detect = false;
  bool halted = false;
  std::vector<NeighborhoodRecord> discovered;
  std::size_t unconfirmed = 0;
  NodeSet fake_set;
};

struct SimReport {
  Algorithm algorithm = Algorithm::Detector;
  std::size_t k = 1;
  std::uint64_t seed = 1;
  ScheduleMode schedule = ScheduleMode::RoundRobin;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t connectivity = 0;
  NodeSet faulty;
  std::vector<std::string> warnings;

  Outcome outcome = Outcome::Quiescent;
  std::size_t steps = 0;
  Counters counters;
  bool channels_into_correct_empty = true;

  NodeSet detecting_nodes;
  // every non-faulty node's view equals the full ground truth
  bool all_discover = false;
  // every non-faulty node holds the true record of every non-faulty node
  bool correct_records_held = false;
  // no non-faulty node holds a wrong record about a non-faulty node
  bool records_exact = false;
  bool all_explorer_mode = false;

  bool audit_enabled = false;
  std::size_t audit_checks = 0;
  std::optional<std::string> audit_violation;

  std::vector<NodeSummary> nodes;
};

inline SimReport make_report(const SimWorld& w) {
  SimReport r;
  r.algorithm = w.algorithm;
  r.k = w.k;
  r.seed = w.config.seed;
  r.schedule = w.config.schedule;
  r.node_count = w.ground_truth.node_count();
  r.edge_count = w.ground_truth.edge_count();
  r.connectivity = w.connectivity;
  r.faulty = w.faulty;
  r.warnings = w.warnings;
  r.outcome = outcome_of(w);
  r.steps = w.step;
  r.counters = w.counters;
  for (const auto& [key, q] : w.channels)
    if (!w.is_faulty(key.second) && !q.empty()) r.channels_into_correct_empty = false;

  r.all_discover = r.correct_records_held = r.records_exact = r.all_explorer_mode = true;
  const auto truth = w.ground_truth.nodes();
  for (const auto& u : w.nodes) {
    NodeSummary s;
    s.id = u;
    if (w.is_faulty(u)) {
      s.faulty = true;
      s.mode = "byzantine";
      r.nodes.push_back(std::move(s));
      continue;
    }
    const auto& p = w.processes.at(u);
    const auto& view = discovered_view(p);
    s.mode = in_explorer_mode(p) ? "explorer" : "detector";
    if (const auto* d = detector_part(p)) {
      s.detect = d->detect;
      s.halted = d->halted;
    }
    if (in_explorer_mode(p)) s.unconfirmed = explorer_part(p)->utop_size();
    if (auto f = w.filters.find(u); f != w.filters.end()) s.fake_set = f->second.fake_set;
    s.discovered = view.to_records();
    if (s.detect) r.detecting_nodes.insert(u);
    if (!in_explorer_mode(p)) r.all_explorer_mode = false;

    if (view.size() != truth.size()) r.all_discover = false;
    for (const auto& v : truth) {
      const auto rec = w.ground_truth.record(v);
      const auto* held = view.find(v);
      if (held == nullptr || *held != rec.neighbors) {
        r.all_discover = false;
        if (!w.is_faulty(v)) {
          if (held == nullptr) r.correct_records_held = false;
          else r.records_exact = r.correct_records_held = false;
        }
      }
    }
    r.nodes.push_back(std::move(s));
  }

  r.audit_enabled = w.audit.enabled;
  r.audit_checks = w.audit.checks;
  r.audit_violation = w.audit.first_violation;
  return r;
}

inline Json node_set_json(const NodeSet& s) {
  Json a = Json::array();
  for (const auto& u : s) a.push_back(u.str());
  return a;
}

inline const char* to_string(Outcome o) { return o == Outcome::Quiescent ? "quiescent" : "step_budget_exhausted"; }

/// Field order is fixed; output is byte-stable for identical inputs.
inline Json to_json(const SimReport& r) {
  Json j;
  j["schema_version"] = 1;
  j["algorithm"] = to_string(r.algorithm);
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["schedule"] = to_string(r.schedule);
  j["graph"] = {{"nodes", r.node_count}, {"edges", r.edge_count}, {"connectivity", r.connectivity}};
  j["faulty"] = node_set_json(r.faulty);
  j["warnings"] = r.warnings;
  j["outcome"] = to_string(r.outcome);
  j["steps"] = r.steps;

  const auto& c = r.counters;
  j["messages"] = {{"detector", c.detector_sent},
                   {"explorer", c.explorer_sent},
                   {"announcement", c.announcements_sent},
                   {"total", c.protocol_sent()},
                   {"identifier_units", c.identifier_units},
                   {"max_message_units", c.max_message_units},
                   {"adversary_emitted", c.adversary_emitted},
                   {"adversary_rejected", c.adversary_rejected},
                   {"absorbed_by_faulty", c.absorbed_by_faulty},
                   {"consumed", c.consumed},
                   {"processed", c.processed},
                   {"discarded_halted", c.discarded_halted},
                   {"filtered", c.filtered},
                   {"ignored", c.ignored},
                   {"rejected_syntax", c.rejected_syntax}};
  j["channels_into_correct_empty"] = r.channels_into_correct_empty;
  j["detecting_nodes"] = node_set_json(r.detecting_nodes);
  j["summary"] = {{"all_discover", r.all_discover},
                  {"correct_records_held", r.correct_records_held},
                  {"records_exact", r.records_exact},
                  {"all_explorer_mode", r.all_explorer_mode}};
  j["audit"] = {{"enabled", r.audit_enabled},
                {"checks", r.audit_checks},
                {"passed", !r.audit_violation.has_value()},
                {"first_violation", r.audit_violation ? Json(*r.audit_violation) : Json(nullptr)}};

  Json nodes = Json::array();
  for (const auto& s : r.nodes) {
    Json n;
    n["id"] = s.id.str();
    n["faulty"] = s.faulty;
    n["mode"] = s.mode;
    if (!s.faulty) {
      n["detect"] = s.detect;
      n["halted"] = s.halted;
      Json recs = Json::array();
      for (const auto& rec : s.discovered) recs.push_back({{"node", rec.node.str()}, {"neighbors", node_set_json(rec.neighbors)}});
      n["discovered"] = std::move(recs);
      n["unconfirmed"] = s.unconfirmed;
      n["fake_set"] = node_set_json(s.fake_set);
    }
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

inline std::string dump_report(const SimReport& r) { return to_json(r).dump(2) + "\n"; }

/// Convenience entry point: build, simulate, report.
inline SimReport run(Topology topology, std::size_t k, Algorithm algorithm, NodeSet faulty, AdversaryStrategy strategy,
                     SimConfig config) {
  return make_report(simulate(make_world(std::move(topology), k, algorithm, std::move(faulty), std::move(strategy), config)));
}

}  // namespace byztopo
