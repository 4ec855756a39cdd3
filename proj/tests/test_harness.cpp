#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "reinforce/io.hpp"
#include "reinforce/stats.hpp"

using namespace reinforce;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_walk_config() {
  ExperimentConfig cfg;
  cfg.kind = "walk";
  cfg.seed = 11;
  cfg.horizon = 2000;
  cfg.replicates = 6;
  cfg.out = "";
  return cfg;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("reinforce_test_" +
                                        std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

// Replicate payload minus the wall-clock duration, which legitimately varies
// between runs.
std::string stable_dump(const ReplicateResult& r) {
  auto j = result_to_json(r);
  j.erase("wall_seconds");
  return j.dump();
}

}  // namespace

TEST_CASE("unknown config fields are rejected") {
  nlohmann::json j = {{"kind", "walk"}, {"horizon", 10}, {"bogus", 1}};
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  nlohmann::json nested = {{"kind", "walk"},
                           {"horizon", 10},
                           {"graph", {{"kind", "line"}, {"oops", 3}}}};
  CHECK_THROWS_AS(config_from_json(nested), std::invalid_argument);
}

TEST_CASE("config json round-trips the typed fields") {
  nlohmann::json j = {
      {"kind", "urn"},
      {"seed", 42},
      {"horizon", 1000},
      {"replicates", 3},
      {"urn", {{"x", 1.5}, {"y", 2.5}, {"rule", {{"a", 2.0}, {"d", 2.0}, {"b", 1.0}, {"c", 1.0}}}}},
      {"checkpoints", {{"kind", "explicit"}, {"points", {10, 100, 1000}}}},
      {"statistic", {{"log_c", 1.0}}}};
  const auto cfg = config_from_json(j);
  CHECK(cfg.kind == "urn");
  CHECK(cfg.urn.rule.a == 2.0);
  CHECK(cfg.urn.rule.b == 1.0);
  CHECK(cfg.checkpoints.points.size() == 3);
  REQUIRE(cfg.statistic_log_c.has_value());
}

TEST_CASE("worker count does not change results or aggregates") {
  auto cfg = small_walk_config();
  const auto one = run_experiment(cfg, 1);
  const auto two = run_experiment(cfg, 2);
  REQUIRE(one.results.size() == two.results.size());
  for (std::size_t i = 0; i < one.results.size(); ++i) {
    CHECK(stable_dump(one.results[i]) == stable_dump(two.results[i]));
  }
  CHECK(one.summary.dump() == two.summary.dump());
}

TEST_CASE("a single replicate equals the direct module call bit for bit") {
  auto cfg = small_walk_config();
  cfg.replicates = 1;
  const auto out = run_experiment(cfg, 1);
  REQUIRE(out.results.size() == 1);

  WalkConfig wc;
  wc.graph = GraphSpec::integer_line();
  wc.horizon = cfg.horizon;
  SplitStream rng = SplitStream::from_key(derive_replicate_seed(cfg.seed, 0));
  const auto direct = run_walk(wc, rng);
  CHECK(out.results[0].walk->final_position == direct.final_position);
  CHECK(out.results[0].walk->final_occupation == direct.final_occupation);
  CHECK(out.results[0].seed == derive_replicate_seed(cfg.seed, 0));
}

TEST_CASE("an injected fault poisons only its replicate") {
  auto cfg = small_walk_config();
  const auto clean = run_experiment(cfg, 2);
  auto faulty_cfg = cfg;
  faulty_cfg.fault_replicate = 3;
  const auto faulty = run_experiment(faulty_cfg, 2);

  REQUIRE(faulty.results.size() == clean.results.size());
  CHECK(faulty.results[3].failed);
  CHECK(faulty.results[3].error == "injected fault");
  for (std::size_t i = 0; i < clean.results.size(); ++i) {
    if (i == 3) continue;
    CHECK(stable_dump(faulty.results[i]) == stable_dump(clean.results[i]));
  }
  CHECK(faulty.summary.at("failed").get<int>() == 1);
}

TEST_CASE("outputs are written atomically with the documented shapes") {
  TempDir tmp;
  auto cfg = small_walk_config();
  cfg.horizon = 64;
  cfg.replicates = 2;
  cfg.checkpoints.kind = "explicit";
  cfg.checkpoints.points = {32, 64};
  cfg.out = (tmp.path / "run").string();
  const auto out = run_experiment(cfg, 1);
  write_outputs(out);

  // JSONL: one line per replicate, fixed leading field order.
  std::ifstream jsonl(cfg.out + ".jsonl");
  REQUIRE(jsonl.good());
  std::string line;
  int lines = 0;
  while (std::getline(jsonl, line)) {
    if (line.empty()) continue;
    ++lines;
    CHECK(line.find("{\"seed\":") == 0);
    const auto obj = nlohmann::ordered_json::parse(line);
    auto it = obj.begin();
    CHECK(it.key() == "seed");
    CHECK((++it).key() == "kind");
    CHECK((++it).key() == "horizon");
    CHECK((++it).key() == "checkpoints");
    CHECK((++it).key() == "estimates");
    CHECK((++it).key() == "monitors");
  }
  CHECK(lines == 2);

  // CSV: header plus 2 checkpoints x visited sites per replicate.
  std::ifstream csv(cfg.out + ".csv");
  REQUIRE(csv.good());
  std::getline(csv, line);
  CHECK(line == "replicate,n,site,Z,density,logExponent");
  std::map<int, int> rows_per_replicate;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    rows_per_replicate[std::stoi(line.substr(0, line.find(',')))] += 1;
  }
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const auto sites =
        static_cast<int>(out.results[i].walk->final_occupation.size());
    CHECK(rows_per_replicate[static_cast<int>(i)] == 2 * sites);
  }

  // Summary file parses and matches the in-memory aggregate.
  std::ifstream sum(cfg.out + ".summary.json");
  REQUIRE(sum.good());
  nlohmann::ordered_json parsed;
  sum >> parsed;
  CHECK(parsed.dump() == out.summary.dump());
}

TEST_CASE("aggregates recomputed from the written jsonl are identical") {
  TempDir tmp;
  auto cfg = small_walk_config();
  cfg.out = (tmp.path / "roundtrip").string();
  const auto out = run_experiment(cfg, 2);
  write_outputs(out);
  const auto recomputed = summary_from_jsonl(cfg, cfg.out + ".jsonl");
  CHECK(recomputed.dump() == out.summary.dump());
}

TEST_CASE("an empty estimator block serializes as an explicit empty object") {
  ReplicateResult r;
  r.seed = 1;
  r.kind = "walk";
  r.horizon = 10;
  const auto j = result_to_json(r);
  CHECK(j.at("estimates").is_object());
  CHECK(j.at("estimates").empty());
  CHECK(j.dump().find("\"estimates\":{}") != std::string::npos);
}

TEST_CASE("checks evaluate against summary scalars") {
  ExperimentConfig cfg = small_walk_config();
  cfg.checks.push_back({"median_final_range", "le", 100.0});
  cfg.checks.push_back({"median_final_range", "ge", 1.0});
  cfg.checks.push_back({"not_a_metric", "le", 1.0});
  const auto out = run_experiment(cfg, 1);
  const auto failures = evaluate_checks(cfg, out.summary);
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].find("not_a_metric") != std::string::npos);
}

TEST_CASE("geometric checkpoint schedules double up to the horizon") {
  const auto sched = geometric_checkpoints(10);
  CHECK(sched == std::vector<std::int64_t>{1, 2, 4, 8, 10});
  const auto big = geometric_checkpoints(1 << 20);
  CHECK(big.front() == 1);
  CHECK(big.back() == 1 << 20);
}

TEST_CASE("statistics helpers behave on known inputs") {
  CHECK(median({1.0, 3.0, 2.0}) == doctest::Approx(2.0));
  CHECK(mean({1.0, 2.0, 3.0}) == doctest::Approx(2.0));

  // KS distance of an exact uniform grid is 1/(2n) shifted by grid offset.
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
  CHECK(ks_distance_uniform(grid) <= 0.001);

  // Same-distribution two-sample test should not reject.
  std::vector<double> xs, ys;
  SplitStream rng(33);
  for (int i = 0; i < 500; ++i) xs.push_back(rng.next_double());
  for (int i = 0; i < 500; ++i) ys.push_back(rng.next_double());
  const auto ks = ks_two_sample(xs, ys);
  CHECK(ks.p_value > 0.01);

  // Clearly different distributions are rejected.
  std::vector<double> zs;
  for (int i = 0; i < 500; ++i) zs.push_back(0.5 + 0.5 * rng.next_double());
  CHECK(ks_two_sample(xs, zs).p_value < 0.01);
}
