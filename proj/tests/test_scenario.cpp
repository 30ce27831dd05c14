#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace byztopo;

namespace {

const char* k4_edges = R"([["a","b"],["a","c"],["a","d"],["b","c"],["b","d"],["c","d"]])";

std::string scenario(const std::string& extra) {
  return std::string(R"({"schema_version": 1, "graph": {"edges": )") + k4_edges + "}" + extra + "}";
}

}  // namespace

TEST(Scenario, MinimalDefaults) {
  auto s = parse_scenario_text(scenario(""));
  EXPECT_EQ(s.graph.node_count(), 4u);
  EXPECT_EQ(s.k, 1u);
  EXPECT_EQ(s.algorithm, Algorithm::Detector);
  EXPECT_EQ(s.adversary.kind, AdversaryKind::Silent);
  EXPECT_EQ(s.config.max_steps, 1'000'000u);
  EXPECT_EQ(s.config.schedule, ScheduleMode::RoundRobin);
  EXPECT_TRUE(s.expected.empty());
}

TEST(Scenario, FullDocument) {
  auto s = parse_scenario_text(scenario(R"(,
    "name": "x", "k": 1, "algorithm": "composed", "faulty": ["b"],
    "variants": {"termination_filters": true, "node_bound": 9},
    "adversary": {"kind": "divergent", "budget": 12, "form": "explorer", "target": "b",
                  "alternatives": [["a"], ["c", "d"]]},
    "seed": 42, "max_steps": 500, "schedule": "random", "fairness_window": 7, "audit": true,
    "expected": {"outcome": "quiescent", "someone_detects": true, "max_messages": 200})"));
  EXPECT_EQ(s.algorithm, Algorithm::Composed);
  EXPECT_EQ(s.faulty, node_set("b"));
  EXPECT_TRUE(s.config.variants.termination_filters);
  EXPECT_EQ(s.config.variants.node_bound, 9u);
  EXPECT_EQ(s.adversary.kind, AdversaryKind::Divergent);
  EXPECT_EQ(s.adversary.budget, 12u);
  EXPECT_EQ(s.adversary.form, MessageForm::Explorer);
  EXPECT_EQ(s.adversary.alternatives.size(), 2u);
  EXPECT_EQ(s.config.seed, 42u);
  EXPECT_EQ(s.config.schedule, ScheduleMode::Random);
  EXPECT_EQ(s.config.fairness_window, 7u);
  EXPECT_TRUE(s.config.audit);
  EXPECT_EQ(s.expected.max_messages, 200u);
}

TEST(Scenario, ScriptMessages) {
  auto s = parse_scenario_text(scenario(R"(, "faulty": ["b"], "adversary": {"kind": "script", "script": [
    {"step": 3, "from": "b", "to": "a", "message": {"type": "explorer", "record": {"node": "c", "neighbors": ["a"]}, "visited": ["d"]}},
    {"from": "b", "to": "c", "message": {"type": "announcement", "origin": "b"}}]})"));
  ASSERT_EQ(s.adversary.script.size(), 2u);
  EXPECT_EQ(s.adversary.script[0].step, 3u);
  EXPECT_EQ(s.adversary.script[0].message, (ProtocolMessage{ExplorerMsg{{"c"_id, node_set("a")}, node_set("d")}}));
  EXPECT_EQ(s.adversary.script[1].message, ProtocolMessage{DetectAnnouncement{"b"_id}});
}

TEST(Scenario, GeneratorGraph) {
  auto s = parse_scenario_text(R"({"schema_version": 1, "graph": {"generator": {"type": "harary", "n": 8, "k": 3}}})");
  EXPECT_EQ(s.graph, harary_graph(3, 8));
}

TEST(Scenario, GraphFileRelativeToScenario) {
  const auto dir = std::filesystem::temp_directory_path() / "byztopo_scenario_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "g.txt") << "a b\nb c\nc a\n";
  std::ofstream(dir / "s.json") << R"({"schema_version": 1, "graph": {"file": "g.txt"}})";
  auto s = load_scenario(dir / "s.json");
  EXPECT_EQ(s.graph.edge_count(), 3u);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, RejectsUnknownFields) {
  EXPECT_THROW(parse_scenario_text(scenario(R"(, "colour": "red")")), ScenarioError);
  EXPECT_THROW(parse_scenario_text(scenario(R"(, "variants": {"turbo": true})")), ScenarioError);
  EXPECT_THROW(parse_scenario_text(scenario(R"(, "adversary": {"kind": "silent", "mood": 1})")), ScenarioError);
  EXPECT_THROW(parse_scenario_text(scenario(R"(, "expected": {"vibes": true})")), ScenarioError);
}

TEST(Scenario, RejectsBadDocuments) {
  EXPECT_THROW(parse_scenario_text("{"), ScenarioError);
  EXPECT_THROW(parse_scenario_text(R"({"graph": {"edges": []}})"), ScenarioError);
  EXPECT_THROW(parse_scenario_text(R"({"schema_version": 2, "graph": {"edges": []}})"), ScenarioError);
  EXPECT_THROW(parse_scenario_text(R"({"schema_version": 1})"), ScenarioError);
  EXPECT_THROW(parse_scenario_text(scenario(R"(, "algorithm": "gossip")")), ScenarioError);
  EXPECT_THROW(parse_scenario_text(scenario(R"(, "k": "one")")), ScenarioError);
  EXPECT_THROW(parse_scenario_text(R"({"schema_version": 1, "graph": {"edges": [["a","a"]]}})"), ScenarioError);
  EXPECT_THROW(parse_scenario_text(R"({"schema_version": 1, "graph": {"edges": [], "file": "x"}})"), ScenarioError);
}

TEST(Scenario, ExpectationsChecked) {
  auto s = parse_scenario_text(scenario(R"(, "expected": {"outcome": "quiescent", "all_discover": true,
    "someone_detects": false, "messages": 48, "detector_messages": 48, "explorer_messages": 0})"));
  auto r = run_scenario(s);
  EXPECT_TRUE(check_expectations(s.expected, r).empty());

  s.expected.messages = 47;
  s.expected.someone_detects = true;
  auto failures = check_expectations(s.expected, r);
  ASSERT_EQ(failures.size(), 2u);
  EXPECT_NE(failures[0].find("someone_detects"), std::string::npos);
  EXPECT_NE(failures[1].find("messages: expected 47, got 48"), std::string::npos);
}

TEST(Scenario, AuditViolationAlwaysFails) {
  SimReport r;
  r.audit_violation = "step 3: something";
  EXPECT_EQ(check_expectations({}, r).size(), 1u);
}

TEST(Report, StableFieldOrder) {
  auto r = run(complete_graph(4), 1, Algorithm::Detector, {}, {}, {});
  auto j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  const std::vector<std::string> want{"schema_version", "algorithm", "k", "seed", "schedule", "graph",
                                      "faulty", "warnings", "outcome", "steps", "messages",
                                      "channels_into_correct_empty", "detecting_nodes", "summary", "audit", "nodes"};
  EXPECT_EQ(keys, want);
  EXPECT_EQ(j["messages"]["total"], 48);
  EXPECT_EQ(j["nodes"][0]["discovered"].size(), 4u);
}
