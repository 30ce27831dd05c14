#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "byztopo/generators.hpp"
#include "byztopo/report.hpp"

namespace byztopo {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioSchemaVersion = 1;

/// Optional assertions checked against the report.
struct Expectations {
  std::optional<Outcome> outcome;
  std::optional<bool> all_discover;
  std::optional<bool> someone_detects;
  std::optional<bool> correct_records_held;
  std::optional<bool> records_exact;
  std::optional<bool> all_explorer_mode;
  std::optional<bool> channels_empty;
  std::optional<std::size_t> messages;  // exact total
  std::optional<std::size_t> max_messages;
  std::optional<std::size_t> detector_messages;
  std::optional<std::size_t> explorer_messages;
  std::optional<std::size_t> max_explorer_messages;
  std::optional<bool> audit_passed;

  bool empty() const {
    return !outcome && !all_discover && !someone_detects && !correct_records_held && !records_exact &&
           !all_explorer_mode && !channels_empty && !messages && !max_messages && !detector_messages &&
           !explorer_messages && !max_explorer_messages && !audit_passed;
  }
};

struct Scenario {
  std::string name;
  Topology graph;
  std::size_t k = 1;
  Algorithm algorithm = Algorithm::Detector;
  NodeSet faulty;
  AdversaryStrategy adversary;
  SimConfig config;
  Expectations expected;
};

namespace detail {

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ScenarioError(where + ": unknown field '" + key + "'");
  }
}

template <class T>
T get_as(const Json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(where + "." + key + ": " + e.what());
  }
}

inline NodeSet node_set_from(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array of node ids");
  NodeSet out;
  for (const auto& v : j) {
    if (!v.is_string() || v.get<std::string>().empty()) throw ScenarioError(where + ": node ids are non-empty strings");
    out.insert(NodeId(v.get<std::string>()));
  }
  return out;
}

inline NeighborhoodRecord record_from(const Json& j, const std::string& where) {
  reject_unknown(j, {"node", "neighbors"}, where);
  return {NodeId(get_as<std::string>(j, "node", where)), node_set_from(j.at("neighbors"), where + ".neighbors")};
}

inline ProtocolMessage message_from(const Json& j, const std::string& where) {
  reject_unknown(j, {"type", "record", "visited", "origin"}, where);
  const auto type = get_as<std::string>(j, "type", where);
  if (type == "detector") return DetectorMsg{record_from(j.at("record"), where + ".record")};
  if (type == "explorer")
    return ExplorerMsg{record_from(j.at("record"), where + ".record"),
                       j.contains("visited") ? node_set_from(j.at("visited"), where + ".visited") : NodeSet{}};
  if (type == "announcement") return DetectAnnouncement{NodeId(get_as<std::string>(j, "origin", where))};
  throw ScenarioError(where + ".type: unknown message type '" + type + "'");
}

inline Topology graph_from(const Json& j, const std::filesystem::path& base) {
  reject_unknown(j, {"edges", "nodes", "file", "generator"}, "graph");
  const int sources = int(j.contains("edges")) + int(j.contains("file")) + int(j.contains("generator"));
  if (sources != 1) throw ScenarioError("graph: give exactly one of edges, file, generator");
  try {
    if (j.contains("file")) {
      auto path = std::filesystem::path(get_as<std::string>(j, "file", "graph"));
      if (path.is_relative()) path = base / path;
      std::ifstream in(path);
      if (!in) throw ScenarioError("graph.file: cannot open " + path.string());
      return parse_edge_list(in);
    }
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      reject_unknown(g, {"type", "n", "k", "seed"}, "graph.generator");
      const auto type = get_as<std::string>(g, "type", "graph.generator");
      GeneratorSpec spec;
      if (type == "complete") spec.kind = GeneratorKind::Complete;
      else if (type == "cycle") spec.kind = GeneratorKind::Cycle;
      else if (type == "harary") spec.kind = GeneratorKind::Harary;
      else if (type == "random") spec.kind = GeneratorKind::RandomKConnected;
      else throw ScenarioError("graph.generator.type: unknown generator '" + type + "'");
      spec.n = get_as<std::size_t>(g, "n", "graph.generator");
      spec.k = g.contains("k") ? get_as<std::size_t>(g, "k", "graph.generator") : 0;
      spec.seed = g.contains("seed") ? get_as<std::uint64_t>(g, "seed", "graph.generator") : 1;
      return generate(spec);
    }
    Topology t;
    if (j.contains("nodes"))
      for (const auto& u : node_set_from(j.at("nodes"), "graph.nodes")) t.add_node(u);
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw ScenarioError("graph.edges: each edge is a pair of node ids");
      t.add_edge(NodeId(e[0].get<std::string>()), NodeId(e[1].get<std::string>()));
    }
    return t;
  } catch (const GraphError& e) {
    throw ScenarioError(std::string("graph: ") + e.what());
  }
}

inline AdversaryStrategy adversary_from(const Json& j) {
  const std::string w = "adversary";
  reject_unknown(j,
                 {"kind", "budget", "form", "rounds", "fake_count", "fake_prefix", "target", "alternatives",
                  "forged_record", "forged_visited", "forged_count", "script"},
                 w);
  AdversaryStrategy s;
  const auto kind = get_as<std::string>(j, "kind", w);
  if (kind == "silent") s.kind = AdversaryKind::Silent;
  else if (kind == "fake_nodes") s.kind = AdversaryKind::FakeNodes;
  else if (kind == "divergent") s.kind = AdversaryKind::Divergent;
  else if (kind == "replay") s.kind = AdversaryKind::Replay;
  else if (kind == "forged_visited") s.kind = AdversaryKind::ForgedVisited;
  else if (kind == "script") s.kind = AdversaryKind::Script;
  else throw ScenarioError("adversary.kind: unknown strategy '" + kind + "'");

  if (j.contains("budget")) s.budget = get_as<std::size_t>(j, "budget", w);
  if (j.contains("form")) {
    const auto f = get_as<std::string>(j, "form", w);
    if (f == "auto") s.form = MessageForm::Auto;
    else if (f == "detector") s.form = MessageForm::Detector;
    else if (f == "explorer") s.form = MessageForm::Explorer;
    else throw ScenarioError("adversary.form: unknown form '" + f + "'");
  }
  if (j.contains("rounds")) s.rounds = get_as<std::size_t>(j, "rounds", w);
  if (j.contains("fake_count")) s.fake_count = get_as<std::size_t>(j, "fake_count", w);
  if (j.contains("fake_prefix")) s.fake_prefix = get_as<std::string>(j, "fake_prefix", w);
  if (j.contains("target")) s.target = NodeId(get_as<std::string>(j, "target", w));
  if (j.contains("alternatives"))
    for (const auto& a : j.at("alternatives")) s.alternatives.push_back(node_set_from(a, "adversary.alternatives"));
  if (j.contains("forged_record")) s.forged_record = record_from(j.at("forged_record"), "adversary.forged_record");
  if (j.contains("forged_visited"))
    for (const auto& a : j.at("forged_visited")) s.forged_visited.push_back(node_set_from(a, "adversary.forged_visited"));
  if (j.contains("forged_count")) s.forged_count = get_as<std::size_t>(j, "forged_count", w);
  if (j.contains("script")) {
    std::size_t i = 0;
    for (const auto& e : j.at("script")) {
      const std::string where = "adversary.script[" + std::to_string(i++) + "]";
      reject_unknown(e, {"step", "from", "to", "message"}, where);
      ScriptEntry entry;
      entry.step = e.contains("step") ? get_as<std::size_t>(e, "step", where) : 0;
      entry.from = NodeId(get_as<std::string>(e, "from", where));
      entry.to = NodeId(get_as<std::string>(e, "to", where));
      entry.message = message_from(e.at("message"), where + ".message");
      s.script.push_back(std::move(entry));
    }
  }
  if (s.fake_count == 0) throw ScenarioError("adversary.fake_count must be positive");
  if (s.forged_count == 0) throw ScenarioError("adversary.forged_count must be positive");
  return s;
}

inline Variants variants_from(const Json& j) {
  reject_unknown(j,
                 {"detector_bound_checks", "node_bound", "halt_on_detect", "terminating_detector",
                  "termination_filters", "forward_each_distinct_path"},
                 "variants");
  Variants v;
  auto flag = [&](const char* key, bool& out) {
    if (j.contains(key)) out = get_as<bool>(j, key, "variants");
  };
  flag("detector_bound_checks", v.detector_bound_checks);
  flag("halt_on_detect", v.halt_on_detect);
  flag("terminating_detector", v.terminating_detector);
  flag("termination_filters", v.termination_filters);
  flag("forward_each_distinct_path", v.forward_each_distinct_path);
  if (j.contains("node_bound")) v.node_bound = get_as<std::size_t>(j, "node_bound", "variants");
  return v;
}

inline Expectations expectations_from(const Json& j) {
  const std::string w = "expected";
  reject_unknown(j,
                 {"outcome", "all_discover", "someone_detects", "correct_records_held", "records_exact",
                  "all_explorer_mode", "channels_empty", "messages", "max_messages", "detector_messages",
                  "explorer_messages", "max_explorer_messages", "audit_passed"},
                 w);
  Expectations e;
  if (j.contains("outcome")) {
    const auto o = get_as<std::string>(j, "outcome", w);
    if (o == "quiescent") e.outcome = Outcome::Quiescent;
    else if (o == "step_budget_exhausted") e.outcome = Outcome::StepBudgetExhausted;
    else throw ScenarioError("expected.outcome: unknown outcome '" + o + "'");
  }
  auto flag = [&](const char* key, std::optional<bool>& out) {
    if (j.contains(key)) out = get_as<bool>(j, key, w);
  };
  auto count = [&](const char* key, std::optional<std::size_t>& out) {
    if (j.contains(key)) out = get_as<std::size_t>(j, key, w);
  };
  flag("all_discover", e.all_discover);
  flag("someone_detects", e.someone_detects);
  flag("correct_records_held", e.correct_records_held);
  flag("records_exact", e.records_exact);
  flag("all_explorer_mode", e.all_explorer_mode);
  flag("channels_empty", e.channels_empty);
  flag("audit_passed", e.audit_passed);
  count("messages", e.messages);
  count("max_messages", e.max_messages);
  count("detector_messages", e.detector_messages);
  count("explorer_messages", e.explorer_messages);
  count("max_explorer_messages", e.max_explorer_messages);
  return e;
}

}  // namespace detail

/// Parses a scenario document. `base` resolves relative graph file paths.
inline Scenario parse_scenario(const Json& j, const std::filesystem::path& base = ".") {
  detail::reject_unknown(j,
                         {"schema_version", "name", "graph", "k", "algorithm", "variants", "faulty", "adversary",
                          "seed", "max_steps", "schedule", "fairness_window", "audit", "expected"},
                         "scenario");
  if (!j.contains("schema_version")) throw ScenarioError("scenario: missing schema_version");
  const auto version = detail::get_as<int>(j, "schema_version", "scenario");
  if (version != kScenarioSchemaVersion)
    throw ScenarioError("scenario: unsupported schema_version " + std::to_string(version));
  if (!j.contains("graph")) throw ScenarioError("scenario: missing graph");

  Scenario s;
  if (j.contains("name")) s.name = detail::get_as<std::string>(j, "name", "scenario");
  s.graph = detail::graph_from(j.at("graph"), base);
  s.k = j.contains("k") ? detail::get_as<std::size_t>(j, "k", "scenario") : 1;

  const auto algo = j.contains("algorithm") ? detail::get_as<std::string>(j, "algorithm", "scenario") : "detector";
  if (algo == "detector") s.algorithm = Algorithm::Detector;
  else if (algo == "explorer") s.algorithm = Algorithm::Explorer;
  else if (algo == "composed") s.algorithm = Algorithm::Composed;
  else throw ScenarioError("scenario.algorithm: unknown algorithm '" + algo + "'");

  if (j.contains("variants")) s.config.variants = detail::variants_from(j.at("variants"));
  if (j.contains("faulty")) s.faulty = detail::node_set_from(j.at("faulty"), "scenario.faulty");
  if (j.contains("adversary")) s.adversary = detail::adversary_from(j.at("adversary"));
  if (j.contains("seed")) s.config.seed = detail::get_as<std::uint64_t>(j, "seed", "scenario");
  if (j.contains("max_steps")) s.config.max_steps = detail::get_as<std::size_t>(j, "max_steps", "scenario");
  if (j.contains("schedule")) {
    const auto m = detail::get_as<std::string>(j, "schedule", "scenario");
    if (m == "round_robin") s.config.schedule = ScheduleMode::RoundRobin;
    else if (m == "random") s.config.schedule = ScheduleMode::Random;
    else throw ScenarioError("scenario.schedule: unknown schedule '" + m + "'");
  }
  if (j.contains("fairness_window"))
    s.config.fairness_window = detail::get_as<std::size_t>(j, "fairness_window", "scenario");
  if (j.contains("audit")) s.config.audit = detail::get_as<bool>(j, "audit", "scenario");
  if (j.contains("expected")) s.expected = detail::expectations_from(j.at("expected"));
  return s;
}

inline Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base = ".") {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_scenario(j, base);
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

inline SimWorld make_world(const Scenario& s) {
  return make_world(s.graph, s.k, s.algorithm, s.faulty, s.adversary, s.config);
}

inline SimReport run_scenario(const Scenario& s) { return make_report(simulate(make_world(s))); }

/// Failed expectations, one line each; empty when all hold. An audit
/// violation always counts as a failure.
inline std::vector<std::string> check_expectations(const Expectations& e, const SimReport& r) {
  std::vector<std::string> out;
  auto flag = [&](const char* what, const std::optional<bool>& want, bool got) {
    if (want && *want != got)
      out.push_back(std::string(what) + ": expected " + (*want ? "true" : "false") + ", got " + (got ? "true" : "false"));
  };
  auto eq = [&](const char* what, const std::optional<std::size_t>& want, std::size_t got) {
    if (want && *want != got) out.push_back(std::string(what) + ": expected " + std::to_string(*want) + ", got " + std::to_string(got));
  };
  auto at_most = [&](const char* what, const std::optional<std::size_t>& bound, std::size_t got) {
    if (bound && got > *bound) out.push_back(std::string(what) + ": " + std::to_string(got) + " exceeds " + std::to_string(*bound));
  };
  if (e.outcome && *e.outcome != r.outcome)
    out.push_back(std::string("outcome: expected ") + to_string(*e.outcome) + ", got " + to_string(r.outcome));
  flag("all_discover", e.all_discover, r.all_discover);
  flag("someone_detects", e.someone_detects, !r.detecting_nodes.empty());
  flag("correct_records_held", e.correct_records_held, r.correct_records_held);
  flag("records_exact", e.records_exact, r.records_exact);
  flag("all_explorer_mode", e.all_explorer_mode, r.all_explorer_mode);
  flag("channels_empty", e.channels_empty, r.channels_into_correct_empty);
  flag("audit_passed", e.audit_passed, !r.audit_violation.has_value());
  eq("messages", e.messages, r.counters.protocol_sent());
  at_most("max_messages", e.max_messages, r.counters.protocol_sent());
  eq("detector_messages", e.detector_messages, r.counters.detector_sent);
  eq("explorer_messages", e.explorer_messages, r.counters.explorer_sent);
  at_most("max_explorer_messages", e.max_explorer_messages, r.counters.explorer_sent);
  if (r.audit_violation && !e.audit_passed) out.push_back("audit: " + *r.audit_violation);
  return out;
}

}  // namespace byztopo
