// byztopo: scenario runner, graph generator and graph oracles.
//
// Exit codes: 0 success, 1 usage or parse error, 2 property or
// precondition violation.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "byztopo/byztopo.hpp"

namespace {

using namespace byztopo;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kViolation = 2;

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_steps;
  std::string out;
  bool audit = false;
};

struct GenArgs {
  std::string type;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 1;
};

struct OracleArgs {
  std::string graph;
  std::string view;
  std::string u, v;
  std::size_t k = 1;
};

Topology read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open " + path);
  return parse_edge_list(in);
}

// One record per line: the node id followed by its neighbors.
ExploredView read_view(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open " + path);
  std::vector<NeighborhoodRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string id;
    if (!(ss >> id)) continue;
    NeighborhoodRecord rec{NodeId(id), {}};
    for (std::string nb; ss >> nb;) rec.neighbors.insert(NodeId(nb));
    if (!rec.well_formed()) throw GraphError("line " + std::to_string(lineno) + ": record lists its own node");
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw GraphError("view file has no records");
  try {
    return ExploredView(records);
  } catch (const std::exception& e) {
    throw GraphError(e.what());
  }
}

int cmd_run(const RunArgs& a) {
  Scenario s;
  try {
    s = load_scenario(a.scenario);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (a.seed) s.config.seed = *a.seed;
  if (a.max_steps) s.config.max_steps = *a.max_steps;
  if (a.audit) s.config.audit = true;

  SimReport report;
  try {
    report = run_scenario(s);
  } catch (const SimulationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

  const auto text = dump_report(report);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << a.out << "\n";
      return kUsage;
    }
    out << text;
  }

  const auto failures = check_expectations(s.expected, report);
  for (const auto& f : failures) std::cerr << "expectation failed: " << f << "\n";
  return failures.empty() ? kOk : kViolation;
}

int cmd_gen(const GenArgs& a) {
  GeneratorSpec spec;
  if (a.type == "complete") spec.kind = GeneratorKind::Complete;
  else if (a.type == "cycle") spec.kind = GeneratorKind::Cycle;
  else if (a.type == "harary") spec.kind = GeneratorKind::Harary;
  else if (a.type == "random") spec.kind = GeneratorKind::RandomKConnected;
  else {
    std::cerr << "error: unknown generator type " << a.type << "\n";
    return kUsage;
  }
  spec.n = a.n;
  spec.k = a.k;
  spec.seed = a.seed;
  try {
    write_edge_list(std::cout, generate(spec));
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

// Inputs that fail to load exit 1; a loaded input that violates the
// operation's precondition exits 2.
template <class Load, class Compute>
int oracle_call(Load&& load, Compute&& compute) {
  std::optional<std::decay_t<decltype(load())>> input;
  try {
    input = load();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    std::cout << compute(*input) << "\n";
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kViolation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust topology discovery simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run a scenario and print its report");
  run->add_option("--scenario", run_args.scenario, "scenario file")->required();
  run->add_option("--seed", run_args.seed, "override the scenario seed");
  run->add_option("--max-steps", run_args.max_steps, "override the step budget");
  run->add_option("--out", run_args.out, "write the report here instead of stdout");
  run->add_flag("--audit", run_args.audit, "audit ghost invariants after every step");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "print a generated graph as an edge list");
  gen->add_option("--type", gen_args.type, "complete|cycle|harary|random")->required();
  gen->add_option("--n", gen_args.n, "node count")->required();
  gen->add_option("--k", gen_args.k, "connectivity (harary, random)");
  gen->add_option("--seed", gen_args.seed, "seed (random)");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "graph oracles");
  oracle->require_subcommand(1);
  auto* conn = oracle->add_subcommand("connectivity", "vertex connectivity of a graph");
  conn->add_option("--graph", oracle_args.graph, "edge-list file")->required();
  auto* paths = oracle->add_subcommand("disjoint-paths", "internally disjoint u-v paths");
  paths->add_option("--graph", oracle_args.graph, "edge-list file")->required();
  paths->add_option("--u", oracle_args.u)->required();
  paths->add_option("--v", oracle_args.v)->required();
  auto* pn = oracle->add_subcommand("path-number", "path_number of an explored view");
  pn->add_option("--view", oracle_args.view, "one record per line: node neighbor...")->required();
  pn->add_option("--k", oracle_args.k)->required();
  pn->add_option("--graph", oracle_args.graph, "ignored, accepted for symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (run->parsed()) return cmd_run(run_args);
  if (gen->parsed()) return cmd_gen(gen_args);
  if (conn->parsed())
    return oracle_call([&] { return read_graph(oracle_args.graph); },
                       [](const Topology& g) { return vertex_connectivity(g); });
  if (paths->parsed())
    return oracle_call([&] { return read_graph(oracle_args.graph); },
                       [&](const Topology& g) {
                         return internally_disjoint_paths(g, NodeId(oracle_args.u), NodeId(oracle_args.v));
                       });
  if (pn->parsed())
    return oracle_call([&] { return read_view(oracle_args.view); },
                       [&](const ExploredView& v) {
                         if (oracle_args.k < 1) throw std::invalid_argument("k must be at least 1");
                         return path_number(v, oracle_args.k);
                       });
  return kUsage;
}
