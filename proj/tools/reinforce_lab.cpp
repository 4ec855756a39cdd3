// Command-line surface of the reinforced-walk laboratory.
//
//   reinforce_lab walk|urn|couple|experiment --config FILE [overrides]
//   reinforce_lab oracle --graph line|interval [--a A --b B] --horizon H ...
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error,
// 3 acceptance-check failure (experiment --check).

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "reinforce/experiment.hpp"
#include "reinforce/io.hpp"
#include "reinforce/oracle.hpp"

namespace {

using reinforce::ExperimentConfig;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> replicates;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "JSON experiment config");
  cmd->add_option("--seed", ov.seed, "base seed override");
  cmd->add_option("--horizon", ov.horizon, "horizon override");
  cmd->add_option("--replicates", ov.replicates, "replicate count override");
  cmd->add_option("--out", ov.out, "output stem override");
  cmd->add_option("--workers", ov.workers, "worker count override");
}

void apply(ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.horizon) cfg.horizon = *ov.horizon;
  if (ov.replicates) cfg.replicates = *ov.replicates;
  if (ov.out) cfg.out = *ov.out;
  if (ov.workers) cfg.workers = *ov.workers;
}

int run_and_write(ExperimentConfig cfg, bool check_mode) {
  cfg.validate();
  const auto output = reinforce::run_experiment(cfg);
  if (!cfg.out.empty()) reinforce::write_outputs(output);
  std::cout << output.summary.dump(2) << std::endl;
  if (check_mode) {
    const auto failures = reinforce::evaluate_checks(cfg, output.summary);
    for (const auto& f : failures) std::cerr << "[check failed] " << f << "\n";
    if (!failures.empty()) return 3;
  }
  return 0;
}

int run_oracle(const std::string& graph_kind, std::int64_t a, std::int64_t b,
               std::int64_t start, std::int64_t horizon, const std::string& law,
               const std::string& out_path) {
  using reinforce::GraphSpec;
  nlohmann::ordered_json out;
  if (law == "coupled") {
    const auto table = reinforce::enumerate_exact_coupled(a, b, start, horizon);
    out["law"] = "coupled";
    out["horizon"] = horizon;
    out["total_mass"] = table.total_mass();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& [key, p] : table.joint)
      rows.push_back(nlohmann::ordered_json{
          {"full", key.first}, {"interval", key.second}, {"p", p}});
    out["joint"] = rows;
  } else {
    GraphSpec graph = GraphSpec::integer_line();
    if (law == "PJ" || graph_kind == "interval")
      graph = GraphSpec::interval(a, b);
    else if (graph_kind != "line")
      throw std::invalid_argument("oracle supports line or interval graphs");
    const auto table = reinforce::enumerate_exact(graph, start, horizon);
    out["law"] = law;
    out["horizon"] = horizon;
    out["total_mass"] = table.total_mass();
    nlohmann::ordered_json paths = nlohmann::ordered_json::array();
    for (const auto& [path, p] : table.paths)
      paths.push_back(nlohmann::ordered_json{{"path", path}, {"p", p}});
    out["paths"] = paths;
    nlohmann::ordered_json occs = nlohmann::ordered_json::array();
    for (const auto& [occ, p] : table.occupations) {
      nlohmann::ordered_json sites = nlohmann::ordered_json::object();
      for (const auto& [site, z] : occ) sites[std::to_string(site)] = z;
      occs.push_back(nlohmann::ordered_json{{"occupation", sites}, {"p", p}});
    }
    out["occupations"] = occs;
  }
  if (out_path.empty()) {
    std::cout << out.dump(2) << std::endl;
  } else {
    reinforce::write_summary_json(out_path, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforced random walk and urn simulation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  // walk
  auto* walk = app.add_subcommand("walk", "vertex- or edge-reinforced walk runs");
  bool walk_errw = false;
  std::string walk_graph = "line";
  std::int64_t walk_a = -2, walk_b = 2, walk_start = 0;
  add_common(walk, config_path, ov);
  walk->add_flag("--errw", walk_errw, "edge-reinforced comparison walk");
  walk->add_option("--graph", walk_graph, "line | interval");
  walk->add_option("--a", walk_a, "interval left end");
  walk->add_option("--b", walk_b, "interval right end");
  walk->add_option("--start", walk_start, "starting vertex");

  // urn
  auto* urn = app.add_subcommand("urn", "two-color urn runs");
  std::vector<double> rule_entries;
  double urn_x = 1.0, urn_y = 1.0;
  add_common(urn, config_path, ov);
  urn->add_option("--rule", rule_entries, "replacement entries a b c d")
      ->expected(4);
  urn->add_option("--x", urn_x, "initial red mass");
  urn->add_option("--y", urn_y, "initial blue mass");

  // couple
  auto* couple = app.add_subcommand("couple", "coupled full-line/interval runs");
  std::int64_t cpl_a = -2, cpl_b = 2, cpl_start = 0;
  add_common(couple, config_path, ov);
  couple->add_option("--a", cpl_a, "interval left end");
  couple->add_option("--b", cpl_b, "interval right end");
  couple->add_option("--start", cpl_start, "starting vertex");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact enumeration tables");
  std::string or_graph = "line", or_law = "P", or_out;
  std::int64_t or_a = -2, or_b = 2, or_start = 0, or_horizon = 4;
  oracle->add_option("--graph", or_graph, "line | interval");
  oracle->add_option("--a", or_a, "interval left end");
  oracle->add_option("--b", or_b, "interval right end");
  oracle->add_option("--start", or_start, "starting vertex");
  oracle->add_option("--horizon", or_horizon, "steps to enumerate");
  oracle->add_option("--law", or_law, "P | PJ | coupled");
  oracle->add_option("--out", or_out, "write the table to this file");

  // experiment
  auto* experiment =
      app.add_subcommand("experiment", "config-driven experiment runner");
  bool check_mode = false;
  add_common(experiment, config_path, ov);
  experiment->add_flag("--check", check_mode,
                       "evaluate config checks; exit 3 on failure");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle->parsed())
      return run_oracle(or_graph, or_a, or_b, or_start, or_horizon, or_law,
                        or_out);

    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = reinforce::load_config(config_path);

    if (walk->parsed()) {
      if (config_path.empty()) {
        cfg.kind = walk_errw ? "errw" : "walk";
        cfg.graph.kind = walk_graph;
        cfg.graph.a = walk_a;
        cfg.graph.b = walk_b;
        cfg.start = walk_start;
      }
      if (cfg.kind != "walk" && cfg.kind != "errw" && cfg.kind != "theorem3")
        throw std::invalid_argument("walk subcommand needs a walk-like kind");
    } else if (urn->parsed()) {
      if (config_path.empty()) {
        cfg.kind = "urn";
        if (rule_entries.size() == 4)
          cfg.urn.rule = {rule_entries[0], rule_entries[1], rule_entries[2],
                          rule_entries[3]};
        cfg.urn.x = urn_x;
        cfg.urn.y = urn_y;
      }
      if (cfg.kind != "urn" && cfg.kind != "random-increment-urn")
        throw std::invalid_argument("urn subcommand needs an urn kind");
    } else if (couple->parsed()) {
      if (config_path.empty()) {
        cfg.kind = "coupled";
        cfg.couple_a = cpl_a;
        cfg.couple_b = cpl_b;
        cfg.start = cpl_start;
      }
      if (cfg.kind != "coupled" && cfg.kind != "lemma-dominates")
        throw std::invalid_argument("couple subcommand needs a coupled kind");
    } else if (experiment->parsed()) {
      if (config_path.empty())
        throw std::invalid_argument("experiment requires --config");
    }

    apply(cfg, ov);
    return run_and_write(std::move(cfg), check_mode);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
