// cdsim: scenario matrix runner and small-graph tooling.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdsim/scenarios.hpp"

namespace fs = std::filesystem;
using namespace cdsim;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailed = 1;
constexpr int kConfigError = 2;

ScenarioConfig load_config(const std::string& path) {
  if (path.empty()) return ScenarioConfig{};
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

// --algorithms and --mode override the config file.
void apply_overrides(ScenarioConfig& config, const std::string& algorithms, const std::string& mode) {
  std::string lines;
  if (!algorithms.empty()) lines += "algorithms = " + algorithms + "\n";
  if (!mode.empty()) lines += "mode = " + mode + "\n";
  if (lines.empty()) return;
  const ScenarioConfig parsed = parse_config(lines);
  if (!algorithms.empty()) config.algorithms = parsed.algorithms;
  if (!mode.empty()) config.modes = parsed.modes;
}

bool trace_enabled() {
  const char* v = std::getenv("SIM_TRACE");
  return v != nullptr && std::string(v) == "1";
}

std::string run_name(const RunSpec& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s_%s_n%zu_v%g_s%llu.log", std::string(to_string(s.algorithm)).c_str(),
                std::string(to_string(s.mode)).c_str(), s.nodes, s.v_max,
                static_cast<unsigned long long>(s.seed));
  return buf;
}

int cmd_run(const std::string& config_path, const std::string& out_path, std::size_t jobs,
            std::uint64_t seed_base, const std::string& algorithms, const std::string& mode) {
  ScenarioConfig config = load_config(config_path);
  apply_overrides(config, algorithms, mode);
  config.validate();

  MatrixOptions options;
  options.jobs = jobs;
  options.seed_base = seed_base;
  if (trace_enabled()) {
    const fs::path dir = out_path.empty() ? fs::path("traces") : fs::path(out_path + ".traces");
    fs::create_directories(dir);
    options.trace_for = [dir](const RunSpec& spec) -> std::unique_ptr<std::ostream> {
      return std::make_unique<std::ofstream>(dir / run_name(spec));
    };
  }
  const auto records = run_matrix(config, options);

  if (out_path.empty()) {
    emit_csv(records, std::cout);
  } else {
    emit_csv(records, fs::path(out_path));
  }
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.failed) continue;
    ++failed;
    std::cerr << "run failed: " << run_name({r.nodes, r.v_max, r.algorithm, r.mode, r.seed}) << ": "
              << r.error << '\n';
  }
  return failed == 0 ? kOk : kRunFailed;
}

int cmd_trace(const std::string& config_path, const std::string& out_path, std::size_t nodes,
              double v_max, const std::string& algorithm, const std::string& mode,
              std::uint64_t seed) {
  ScenarioConfig config = load_config(config_path);
  config.validate();
  RunSpec spec;
  spec.nodes = nodes;
  spec.v_max = v_max;
  spec.algorithm = parse_algorithm(algorithm);
  spec.mode = parse_route_mode(mode);
  spec.seed = seed;

  MetricsRecord record;
  if (out_path.empty()) {
    record = run_simulation(config, spec, &std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    record = run_simulation(config, spec, &out);
  }
  emit_csv({record}, std::cerr);
  if (record.failed) std::cerr << "run failed: " << record.error << '\n';
  return record.failed ? kRunFailed : kOk;
}

int cmd_oracle_file(const std::string& graph_path, std::uint64_t seed) {
  std::ifstream in(graph_path);
  if (!in) throw Error("cannot read graph '" + graph_path + "'");
  const UdgSnapshot g = read_graph(in);
  if (!g.connected()) throw Error("graph is not connected");
  std::vector<double> energy(g.size(), 1.0);
  std::vector<double> speed(g.size(), 0.0);
  const auto attrs = make_attributes(g, energy, speed);
  const auto tables = neighbor_tables(g);
  for (auto a : kAllAlgorithms) write_backbone(std::cout, construct_backbone(a, g, tables, attrs), g, seed);
  if (g.size() <= 12) {
    std::cout << "minimum " << brute_force_min_cds(g).count() << '\n';
  }
  return kOk;
}

int cmd_oracle(std::size_t graphs, std::size_t max_nodes, std::uint64_t seed) {
  if (max_nodes < 2 || max_nodes > 12) throw Error("--max-nodes must lie in [2, 12]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(2, max_nodes);
  std::uniform_real_distribution<double> energy(1.0, 15.0);
  std::uniform_real_distribution<double> speed(0.0, 5.0);

  std::cout << "graph,n,minimum";
  for (auto a : kAllAlgorithms) std::cout << ',' << to_string(a);
  std::cout << '\n';
  std::vector<double> ratio(kAllAlgorithms.size(), 0.0);
  std::size_t below = 0;
  for (std::size_t i = 0; i < graphs; ++i) {
    const std::size_t n = size(rng);
    // Side chosen so a 250 m range gives a few hops across.
    const double side = 200.0 * std::sqrt(static_cast<double>(n));
    const UdgSnapshot g = random_connected_udg(n, Area{side, side}, 250.0, rng());
    std::vector<double> e(n), v(n);
    for (auto& x : e) x = energy(rng);
    for (auto& x : v) x = speed(rng);
    const auto attrs = make_attributes(g, e, v);
    const auto tables = neighbor_tables(g);
    const std::size_t minimum = brute_force_min_cds(g).count();
    std::cout << i << ',' << n << ',' << minimum;
    for (std::size_t k = 0; k < kAllAlgorithms.size(); ++k) {
      const std::size_t got = construct_backbone(kAllAlgorithms[k], g, tables, attrs).size();
      if (got < minimum) ++below;
      ratio[k] += static_cast<double>(got) / static_cast<double>(minimum);
      std::cout << ',' << got;
    }
    std::cout << '\n';
  }
  for (std::size_t k = 0; k < kAllAlgorithms.size(); ++k) {
    std::cerr << to_string(kAllAlgorithms[k]) << " mean ratio "
              << (graphs == 0 ? 0.0 : ratio[k] / static_cast<double>(graphs)) << '\n';
  }
  if (below > 0) {
    std::cerr << below << " backbones smaller than the minimum\n";
    return kRunFailed;
  }
  return kOk;
}

int cmd_summarize(const std::string& in_path, const std::string& out_path,
                  const std::string& baseline) {
  std::ifstream in(in_path);
  if (!in) throw Error("cannot read '" + in_path + "'");
  std::vector<std::string> warnings;
  const auto rows = summarize(read_csv(in), parse_algorithm(baseline), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (out_path.empty()) {
    write_summary(rows, std::cout);
    return kOk;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write '" + out_path + "'");
  write_summary(rows, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MANET connected-dominating-set backbone simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::size_t jobs = 1;
  std::uint64_t seed_base = 0;
  std::string algorithms;
  std::string mode;

  auto* run = app.add_subcommand("run", "run the scenario matrix and write CSV");
  run->add_option("--config", config_path, "config file (key = value)");
  run->add_option("--out", out_path, "CSV output (default stdout)");
  run->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--seed-base", seed_base, "offset added to every seed");
  run->add_option("--algorithms", algorithms, "comma-separated algorithm tags");
  run->add_option("--mode", mode, "cds, flooding or both");

  std::size_t nodes = 100;
  double v_max = 5.0;
  std::string algorithm = "EAS_CDS";
  std::uint64_t seed = 1;
  auto* trace = app.add_subcommand("trace", "one seeded run with its event log");
  trace->add_option("--config", config_path, "config file (key = value)");
  trace->add_option("--out", out_path, "event log (default stdout)");
  trace->add_option("--nodes", nodes, "node count")->check(CLI::PositiveNumber);
  trace->add_option("--vmax", v_max, "maximum speed (m/s)")->check(CLI::NonNegativeNumber);
  trace->add_option("--algorithm", algorithm, "algorithm tag");
  trace->add_option("--mode", mode, "cds or flooding");
  trace->add_option("--seed", seed, "seed");

  std::size_t graphs = 200;
  std::size_t max_nodes = 10;
  std::string graph_path;
  auto* oracle = app.add_subcommand("oracle", "compare backbones with the exact minimum on small graphs");
  oracle->add_option("--graphs", graphs, "number of random graphs");
  oracle->add_option("--max-nodes", max_nodes, "largest graph size (at most 12)");
  oracle->add_option("--seed", seed, "seed");
  oracle->add_option("--graph", graph_path, "evaluate one graph file instead");

  std::string in_path;
  std::string baseline = "WU_EMPR";
  auto* summary = app.add_subcommand("summarize", "aggregate a results CSV");
  summary->add_option("--in", in_path, "results CSV")->required();
  summary->add_option("--out", out_path, "summary CSV (default stdout)");
  summary->add_option("--baseline", baseline, "algorithm the improvement columns compare to");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, out_path, jobs, seed_base, algorithms, mode);
    if (*trace) {
      return cmd_trace(config_path, out_path, nodes, v_max, algorithm, mode.empty() ? "cds" : mode, seed);
    }
    if (*oracle) return graph_path.empty() ? cmd_oracle(graphs, max_nodes, seed) : cmd_oracle_file(graph_path, seed);
    if (*summary) return cmd_summarize(in_path, out_path, baseline);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    // Invalid arguments and unreadable inputs are configuration problems.
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailed;
  }
  return kOk;
}
