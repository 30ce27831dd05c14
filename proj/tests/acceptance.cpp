// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every simulation here runs with the ghost-invariant audit
// on; its verdicts feed criterion 10, quiescence feeds 12, a byte-for-byte
// rerun feeds 13.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace byztopo;

namespace {

// Pinned tolerances.
constexpr double kDetectorSecondsPerRun = 1.0;
constexpr double kExplorerSecondsPerRun = 2.0;
constexpr std::size_t kSeeds = 20;
constexpr std::size_t kValidityRuns = 200;
constexpr std::size_t kMengerCorpus = 500;

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  std::size_t failures = 0;

  void fail(std::string why) {
    pass = false;
    ++failures;
    if (problems.size() < 12) problems.push_back(std::move(why));
  }
};

struct Case {
  std::string label;
  Topology graph;
  std::size_t k = 1;
  Algorithm algorithm = Algorithm::Detector;
  NodeSet faulty;
  AdversaryStrategy strategy;
  SimConfig config;
};

struct Execution {
  SimReport report;
  std::string dump;
  double seconds = 0;
};

// ledger for the cross-cutting criteria 10, 12, 13
struct Ledger {
  std::size_t runs = 0;
  std::size_t audit_checks = 0;
  std::vector<std::string> audit_failures;
  std::vector<std::string> not_quiescent;
  std::vector<std::string> not_deterministic;
} ledger;

Execution execute(Case c, const StepObserver& observer = {}) {
  c.config.audit = true;
  const auto start = std::chrono::steady_clock::now();
  auto world = simulate(make_world(c.graph, c.k, c.algorithm, c.faulty, c.strategy, c.config), observer);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Execution e{make_report(world), {}, elapsed};
  e.dump = dump_report(e.report);

  ++ledger.runs;
  ledger.audit_checks += e.report.audit_checks;
  if (e.report.audit_violation) ledger.audit_failures.push_back(c.label + ": " + *e.report.audit_violation);
  if (e.report.outcome != Outcome::Quiescent || !e.report.channels_into_correct_empty)
    ledger.not_quiescent.push_back(c.label);
  const auto again = dump_report(make_report(simulate(make_world(c.graph, c.k, c.algorithm, c.faulty, c.strategy, c.config))));
  if (again != e.dump) ledger.not_deterministic.push_back(c.label);
  return e;
}

// Time an unaudited run; the audit is a test device, not part of the cost.
double timed(Case c) {
  c.config.audit = false;
  const auto start = std::chrono::steady_clock::now();
  auto w = simulate(make_world(c.graph, c.k, c.algorithm, c.faulty, c.strategy, c.config));
  (void)w;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SimConfig seeded(std::uint64_t seed, ScheduleMode mode = ScheduleMode::Random) {
  SimConfig c;
  c.seed = seed;
  c.schedule = mode;
  return c;
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f s", s);
  return buf;
}

struct GraphCase {
  std::string name;
  Topology graph;
  std::size_t k;
};

// K4, K6, H(3,8) at k = 1 and 2, plus 20 random (k+1)-connected graphs.
std::vector<GraphCase> detector_corpus() {
  std::vector<GraphCase> out;
  for (std::size_t k : {1, 2}) {
    out.push_back({"K4", complete_graph(4), k});
    out.push_back({"K6", complete_graph(6), k});
    out.push_back({"H(3,8)", harary_graph(3, 8), k});
  }
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t k = 1 + i % 2;
    const std::size_t n = 5 + i % 6;
    out.push_back({"random_kconn(" + std::to_string(n) + "," + std::to_string(k + 1) + ",seed=" + std::to_string(i + 1) + ")",
                   random_k_connected(n, k + 1, i + 1), k});
  }
  return out;
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  Verdict v;
  double worst = 0;
  std::size_t runs = 0;
  for (const auto& g : detector_corpus()) {
    Case c{"c1 " + g.name + " k=" + std::to_string(g.k), g.graph, g.k, Algorithm::Detector, {}, {}, {}};
    auto e = execute(c);
    const auto& r = e.report;
    const std::size_t want = 2 * g.graph.edge_count() * g.graph.node_count();
    if (!r.all_discover) v.fail(c.label + ": some TOP differs from ground truth");
    if (!r.detecting_nodes.empty()) v.fail(c.label + ": detect fired");
    if (r.counters.detector_sent != want)
      v.fail(c.label + ": " + std::to_string(r.counters.detector_sent) + " messages, 2en = " + std::to_string(want));
    const double t = timed(c);
    worst = std::max(worst, t);
    if (t >= kDetectorSecondsPerRun) v.fail(c.label + ": took " + fmt_seconds(t));
    ++runs;
  }
  v.detail = std::to_string(runs) + " runs, counts = 2en exactly, slowest " + fmt_seconds(worst);
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto corpus = detector_corpus();
  std::size_t detects = 0;
  for (std::size_t i = 0; i < kValidityRuns; ++i) {
    const auto& g = corpus[i % corpus.size()];
    Case c{"c2 " + g.name + " seed=" + std::to_string(i + 1), g.graph, g.k, Algorithm::Detector, {}, {}, seeded(i + 1)};
    if (i % 3 == 1) c.config.variants.detector_bound_checks = true;
    auto e = execute(c);
    if (!e.report.detecting_nodes.empty()) {
      ++detects;
      v.fail(c.label + ": detect fired without faults");
    }
  }
  v.detail = std::to_string(kValidityRuns) + " random-schedule runs, " + std::to_string(detects) + " detect events";
  return v;
}

Verdict criterion3() {
  Verdict v;
  std::size_t runs = 0;
  const std::vector<GraphCase> graphs{{"K4", complete_graph(4), 1}, {"H(2,7)", harary_graph(2, 7), 1}};
  for (const auto& g : graphs) {
    const std::size_t delta = g.graph.max_degree();
    for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
      AdversaryStrategy s;
      s.kind = AdversaryKind::FakeNodes;
      s.fake_count = 1 + seed % 3;
      s.budget = seed % 2 ? delta : 4 * delta;
      const NodeSet faulty{numbered(seed % g.graph.node_count())};
      Case c{"c3 " + g.name + " seed=" + std::to_string(seed), g.graph, 1, Algorithm::Detector, faulty, s, seeded(seed)};
      auto e = execute(c);
      if (e.report.detecting_nodes.empty()) v.fail(c.label + ": no detection");
      ++runs;
    }
  }
  v.detail = std::to_string(runs) + " runs, budgets delta and 4*delta, 1-3 fake ids";
  return v;
}

Verdict criterion4() {
  Verdict v;
  for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
    AdversaryStrategy s;
    s.kind = AdversaryKind::Divergent;
    const NodeSet faulty{numbered(seed % 4)};
    Case c{"c4 K4 seed=" + std::to_string(seed), complete_graph(4), 1, Algorithm::Detector, faulty, s, seeded(seed)};
    auto e = execute(c);
    if (e.report.detecting_nodes.empty()) v.fail(c.label + ": no detection");
  }
  v.detail = std::to_string(kSeeds) + " seeds";
  return v;
}

Verdict criterion5() {
  Verdict v;
  std::size_t views = 0;
  for (const auto& g : detector_corpus()) {
    Case c{"c5 " + g.name + " k=" + std::to_string(g.k), g.graph, g.k, Algorithm::Detector, {}, {}, {}};
    auto check = [&](const SimWorld& w, const Event& ev) {
      if (ev.kind == EventKind::Adversary) return;
      const auto& top = std::get<DetectorState>(w.processes.at(ev.node)).top;
      ++views;
      if (path_number(top, g.k) < g.k + 1) v.fail(c.label + ": view at " + ev.node.str() + " step " + std::to_string(w.step));
    };
    execute(c, check);
  }
  v.detail = std::to_string(views) + " intermediate views sampled";
  return v;
}

Verdict criterion6() {
  Verdict v;
  const auto corpus = oracle::small_graph_corpus(5, 300, 6);
  std::size_t pairs = 0;
  for (const auto& t : corpus) {
    const auto ids = t.nodes();
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        ++pairs;
        if (internally_disjoint_paths(t, ids[i], ids[j]) != oracle::disjoint_paths_by_cut(t, ids[i], ids[j]))
          v.fail("mismatch on " + to_edge_list(t));
      }
  }
  if (corpus.size() < kMengerCorpus) v.fail("corpus too small: " + std::to_string(corpus.size()));
  v.detail = std::to_string(corpus.size()) + " graphs, " + std::to_string(pairs) + " pairs";
  return v;
}

Verdict criterion7() {
  Verdict v;
  const std::vector<GraphCase> graphs{
      {"K4", complete_graph(4), 1}, {"K6", complete_graph(6), 2}, {"H(5,12)", harary_graph(5, 12), 2}};
  double worst = 0;
  std::ostringstream counts;
  for (const auto& g : graphs) {
    Case c{"c7 " + g.name, g.graph, g.k, Algorithm::Explorer, {}, {}, {}};
    auto e = execute(c);
    const std::size_t bound = 4 * g.graph.edge_count() * g.graph.node_count();
    if (!e.report.all_discover) v.fail(c.label + ": ctop incomplete");
    if (e.report.counters.explorer_sent > bound)
      v.fail(c.label + ": " + std::to_string(e.report.counters.explorer_sent) + " > 4en = " + std::to_string(bound));
    const double t = timed(c);
    worst = std::max(worst, t);
    if (t >= kExplorerSecondsPerRun) v.fail(c.label + ": took " + fmt_seconds(t));
    counts << " " << g.name << "=" << e.report.counters.explorer_sent << "/" << bound;
  }
  v.detail = "messages/4en:" + counts.str() + ", slowest " + fmt_seconds(worst);
  return v;
}

// Strong discovery assertions shared by criteria 8 and 9.
void check_strong_discovery(Verdict& v, const std::string& label, const SimReport& r, const Topology& truth,
                            const NodeSet& faulty) {
  if (!r.correct_records_held) v.fail(label + ": a correct node misses a correct node's record");
  if (!r.records_exact) v.fail(label + ": a confirmed record about a correct node is wrong");
  for (const auto& n : r.nodes)
    for (const auto& rec : n.discovered)
      if (!truth.has_node(rec.node)) v.fail(label + ": " + n.id.str() + " confirmed fake node " + rec.node.str());
  (void)faulty;
}

AdversaryStrategy explorer_strategy(AdversaryKind kind, std::size_t seed) {
  AdversaryStrategy s;
  s.kind = kind;
  s.fake_count = 1 + seed % 3;
  s.rounds = 1 + seed % 2;
  s.forged_count = 2 + seed % 3;
  return s;
}

const char* kind_name(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::Silent: return "silent";
    case AdversaryKind::FakeNodes: return "fake_nodes";
    case AdversaryKind::Divergent: return "divergent";
    case AdversaryKind::Replay: return "replay";
    case AdversaryKind::ForgedVisited: return "forged_visited";
    case AdversaryKind::Script: return "script";
  }
  return "?";
}

const std::vector<AdversaryKind> kStrongStrategies{AdversaryKind::Silent, AdversaryKind::Divergent,
                                                   AdversaryKind::ForgedVisited, AdversaryKind::FakeNodes};

Verdict criterion8() {
  Verdict v;
  const std::vector<GraphCase> graphs{{"K4", complete_graph(4), 1},
                                      {"H(3,8)", harary_graph(3, 8), 1},
                                      {"random_kconn(8,3,seed=5)", random_k_connected(8, 3, 5), 1}};
  std::size_t runs = 0;
  for (const auto& g : graphs)
    for (auto kind : kStrongStrategies)
      for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
        const NodeSet faulty{numbered(seed % g.graph.node_count())};
        Case c{std::string("c8 ") + g.name + " " + kind_name(kind) + " seed=" + std::to_string(seed), g.graph, 1,
               Algorithm::Explorer, faulty, explorer_strategy(kind, seed), seeded(seed)};
        auto e = execute(c);
        check_strong_discovery(v, c.label, e.report, g.graph, faulty);
        ++runs;
      }
  v.detail = std::to_string(runs) + " runs over 3 graphs x 4 strategies x " + std::to_string(kSeeds) + " seeds";
  return v;
}

Verdict criterion9() {
  Verdict v;
  const std::vector<GraphCase> graphs{{"K6", complete_graph(6), 2}, {"K7", complete_graph(7), 2}};
  std::ostringstream modes;
  for (bool distinct : {false, true}) {
    Verdict mode;
    std::size_t runs = 0, bad_runs = 0;
    for (const auto& g : graphs)
      for (auto kind : kStrongStrategies)
        for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
          const std::size_t n = g.graph.node_count();
          const NodeSet faulty{numbered(seed % n), numbered((seed + 2) % n)};
          SimConfig cfg = seeded(seed);
          cfg.variants.forward_each_distinct_path = distinct;
          Case c{std::string("c9 ") + g.name + " " + kind_name(kind) + (distinct ? " distinct-path" : " first-arrival") +
                     " seed=" + std::to_string(seed),
                 g.graph, 2, Algorithm::Explorer, faulty, explorer_strategy(kind, seed), cfg};
          auto e = execute(c);
          const auto before = mode.failures;
          check_strong_discovery(mode, c.label, e.report, g.graph, faulty);
          bad_runs += mode.failures != before;
          ++runs;
        }
    modes << (distinct ? "; distinct-path " : "first-arrival ") << "fails " << bad_runs << "/" << runs << " runs";
    if (!distinct) {
      if (mode.pass) {
        v.detail = "first-arrival forwarding suffices: ";
      } else {
        v.detail = "distinct-path forwarding required: ";
        for (const auto& p : mode.problems) std::cerr << "  first-arrival: " << p << "\n";
      }
    } else if (!mode.pass) {
      for (const auto& p : mode.problems) v.fail(p);
    }
  }
  v.detail += modes.str();
  return v;
}

Verdict criterion11() {
  Verdict v;
  std::size_t clean = 0, triggered = 0;
  for (const auto& g : detector_corpus()) {
    Case c{"c11 composed " + g.name + " k=" + std::to_string(g.k), g.graph, g.k, Algorithm::Composed, {}, {}, {}};
    auto e = execute(c);
    const std::size_t want = 2 * g.graph.edge_count() * g.graph.node_count();
    if (e.report.counters.explorer_sent != 0) v.fail(c.label + ": emitted Explorer messages");
    if (e.report.counters.detector_sent != want) v.fail(c.label + ": detector count differs from 2en");
    if (!e.report.all_discover) v.fail(c.label + ": incomplete discovery");
    ++clean;
  }
  const std::vector<GraphCase> graphs{{"K4", complete_graph(4), 1}, {"H(3,8)", harary_graph(3, 8), 1},
                                      {"K6", complete_graph(6), 2}};
  for (const auto& g : graphs)
    for (auto kind : {AdversaryKind::Divergent, AdversaryKind::FakeNodes})
      for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
        const std::size_t n = g.graph.node_count();
        NodeSet faulty{numbered(seed % n)};
        if (g.k == 2) faulty.insert(numbered((seed + 3) % n));
        AdversaryStrategy s;
        s.kind = kind;
        s.form = MessageForm::Detector;
        SimConfig cfg = seeded(seed);
        cfg.variants.forward_each_distinct_path = g.k > 1;
        Case c{std::string("c11 composed ") + g.name + " " + kind_name(kind) + " seed=" + std::to_string(seed), g.graph,
               g.k, Algorithm::Composed, faulty, s, cfg};
        auto e = execute(c);
        if (!e.report.all_explorer_mode) v.fail(c.label + ": some correct node stayed in detector mode");
        if (!e.report.correct_records_held || !e.report.records_exact) v.fail(c.label + ": explorer phase incomplete");
        ++triggered;
      }
  v.detail = std::to_string(clean) + " fault-free runs with zero Explorer messages, " + std::to_string(triggered) +
             " triggered runs all in explorer mode";
  return v;
}

// Terminating variants on the adversarial workloads of 3, 4, 8, 9, 11.
Verdict criterion12() {
  Verdict v;
  std::size_t extra = 0;
  for (std::size_t seed = 1; seed <= kSeeds; ++seed) {
    AdversaryStrategy s;
    s.kind = seed % 2 ? AdversaryKind::FakeNodes : AdversaryKind::Divergent;
    SimConfig cfg = seeded(seed);
    cfg.variants.terminating_detector = true;
    Case c{"c12 terminating detector seed=" + std::to_string(seed), harary_graph(2, 7), 1, Algorithm::Detector,
           NodeSet{numbered(seed % 7)}, s, cfg};
    auto e = execute(c);
    if (e.report.detecting_nodes.empty()) v.fail(c.label + ": no detection");
    for (const auto& n : e.report.nodes)
      if (!n.faulty && !n.halted) v.fail(c.label + ": " + n.id.str() + " not halted");
    ++extra;
  }
  const std::vector<GraphCase> graphs{{"K4", complete_graph(4), 1}, {"H(3,8)", harary_graph(3, 8), 1},
                                      {"K7", complete_graph(7), 2}};
  for (const auto& g : graphs)
    for (auto algorithm : {Algorithm::Explorer, Algorithm::Composed})
      for (auto kind : kStrongStrategies)
        for (std::size_t seed = 1; seed <= 5; ++seed) {
          const std::size_t n = g.graph.node_count();
          NodeSet faulty{numbered(seed % n)};
          if (g.k == 2) faulty.insert(numbered((seed + 2) % n));
          SimConfig cfg = seeded(seed);
          cfg.variants.termination_filters = true;
          cfg.variants.forward_each_distinct_path = g.k > 1;
          auto s = explorer_strategy(kind, seed);
          s.budget = 64;
          Case c{std::string("c12 filters ") + to_string(algorithm) + " " + g.name + " " + kind_name(kind) +
                     " seed=" + std::to_string(seed),
                 g.graph, g.k, algorithm, faulty, s, cfg};
          auto e = execute(c);
          if (algorithm == Algorithm::Explorer || e.report.all_explorer_mode)
            check_strong_discovery(v, c.label, e.report, g.graph, faulty);
          for (const auto& node : e.report.nodes)
            for (const auto& f : node.fake_set)
              if (g.graph.has_node(f)) v.fail(c.label + ": real node " + f.str() + " judged fake");
          ++extra;
        }
  v.detail = std::to_string(extra) + " terminating-variant runs; ";
  for (const auto& l : ledger.not_quiescent) v.fail(l + ": not quiescent or channels non-empty");
  v.detail += std::to_string(ledger.runs) + " runs total, " + std::to_string(ledger.not_quiescent.size()) +
              " ended short of quiescence";
  return v;
}

Verdict criterion10() {
  Verdict v;
  for (const auto& f : ledger.audit_failures) v.fail(f);
  v.detail = std::to_string(ledger.runs) + " audited runs, " + std::to_string(ledger.audit_checks) + " audit points, " +
             std::to_string(ledger.audit_failures.size()) + " violations";
  return v;
}

Verdict criterion13() {
  Verdict v;
  for (const auto& l : ledger.not_deterministic) v.fail(l + ": rerun produced a different report");
  v.detail = std::to_string(ledger.runs) + " runs repeated byte-for-byte";
  return v;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<Verdict()> check;
  };
  // 10, 12 and 13 summarize every run made before them, so they go last.
  const std::vector<Entry> entries{
      {1, "detector fault-free exactness", criterion1},
      {2, "detector validity", criterion2},
      {3, "fake-node detection", criterion3},
      {4, "divergence detection", criterion4},
      {5, "path_number stays above k on fault-free views", criterion5},
      {6, "Menger oracle equivalence", criterion6},
      {7, "explorer fault-free", criterion7},
      {8, "explorer strong discovery, k=1", criterion8},
      {9, "explorer strong discovery, k=2", criterion9},
      {11, "composition economy", criterion11},
      {12, "termination and quiescence", criterion12},
      {10, "ghost invariant audits", criterion10},
      {13, "determinism", criterion13},
  };
  std::vector<std::pair<int, std::string>> lines;
  bool all = true;
  for (const auto& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v = e.check();
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && v.pass;
    std::cerr << "criterion " << e.id << " done in " << fmt_seconds(secs) << std::endl;
    std::ostringstream line;
    line << (v.pass ? "PASS" : "FAIL") << " criterion " << e.id << ": " << e.title << " -- " << v.detail << " ["
         << fmt_seconds(secs) << "]";
    for (const auto& p : v.problems) line << "\n    " << p;
    lines.emplace_back(e.id, line.str());
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [id, text] : lines) std::cout << text << "\n";
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << "\n";
  return all ? 0 : 1;
}
