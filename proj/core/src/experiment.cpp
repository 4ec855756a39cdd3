#include "reinforce/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "reinforce/io.hpp"
#include "reinforce/stats.hpp"

namespace reinforce {

GraphSpec GraphParams::build() const {
  GraphSpec g = GraphSpec::integer_line();
  if (kind == "line") {
    g = GraphSpec::integer_line();
  } else if (kind == "interval") {
    g = GraphSpec::interval(a, b);
  } else if (kind == "finite") {
    g = GraphSpec::finite(adjacency);
  } else {
    throw std::invalid_argument("unknown graph kind: " + kind);
  }
  for (const auto& [u, v, w] : weights) g.set_edge_weight(u, v, w);
  return g;
}

RandomIncrementSpec IncrementParams::build() const {
  if (kind == "deterministic")
    return RandomIncrementSpec::deterministic(value, mean_lo, mean_hi,
                                              second_moment);
  if (kind == "geometric")
    return RandomIncrementSpec::geometric(p, mean_lo, mean_hi, second_moment);
  if (kind == "table")
    return RandomIncrementSpec::empirical(table, mean_lo, mean_hi,
                                          second_moment);
  throw std::invalid_argument("unknown increment kind: " + kind);
}

std::vector<std::int64_t> CheckpointParams::resolve(std::int64_t horizon) const {
  if (kind == "geometric") return geometric_checkpoints(horizon, ratio);
  if (kind == "explicit") {
    if (points.empty()) throw std::invalid_argument("explicit checkpoints empty");
    return points;
  }
  throw std::invalid_argument("unknown checkpoint kind: " + kind);
}

namespace {

const std::vector<std::string> kKinds = {
    "walk",    "errw",     "urn",
    "random-increment-urn", "coupled", "theorem3",
    "lemma-dominates"};

}  // namespace

void ExperimentConfig::validate() const {
  bool known = false;
  for (const auto& k : kKinds) known = known || k == kind;
  if (!known) throw std::invalid_argument("unknown experiment kind: " + kind);
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (format != "jsonl" && format != "csv" && format != "both")
    throw std::invalid_argument("format must be jsonl, csv or both");
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0))
    throw std::invalid_argument("window fraction must lie in (0, 1)");
  if (monitors.stops) monitors.stops->validate();
  if (kind == "urn") {
    urn.rule.validate();
    if (!(urn.x > 0.0) || !(urn.y > 0.0))
      throw std::invalid_argument("urn masses must start positive");
  }
  if (kind == "random-increment-urn") increment.build();
  if (kind == "coupled" && !couple_unbounded && couple_a >= couple_b)
    throw std::invalid_argument("coupling interval requires a < b");
  if (kind == "lemma-dominates" && dominance_span < 3)
    throw std::invalid_argument("dominance span must be >= 3");
  for (const auto& c : checks)
    if (c.op != "le" && c.op != "ge")
      throw std::invalid_argument("check op must be le or ge");
}

SyntheticInit default_quintuple(std::int64_t n0, double band_lo, double band_hi,
                                Vertex center) {
  if (n0 < 100) throw std::invalid_argument("quintuple n0 must be >= 100");
  SyntheticInit init;
  init.position = center;
  const auto z1 = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n0) * (band_lo + band_hi) / 4.0));
  const auto z0 = n0 / 2;
  init.counts[center] = z0;
  init.counts[center + 1] = z1;
  init.counts[center - 1] = z0 - z1 + 2;  // keeps the ratio near the band center
  init.counts[center + 2] = 2;
  init.counts[center - 2] = 2;
  return init;
}

namespace {

// Kind-specific defaults so a minimal config runs the full construction.
ExperimentConfig with_kind_defaults(ExperimentConfig cfg) {
  if (cfg.kind == "theorem3") {
    StopRules stops = cfg.monitors.stops.value_or(StopRules{});
    cfg.monitors.stops = stops;
    const Vertex c = stops.center;
    cfg.graph.kind = "interval";
    cfg.graph.a = c - 2;
    cfg.graph.b = c + 2;
    cfg.start = c;
    if (!cfg.init) {
      const auto n0 = cfg.quintuple_n0.value_or(stops.n0);
      cfg.init = default_quintuple(n0, stops.band_lo, stops.band_hi, c);
    }
    if (cfg.monitors.returns.empty()) {
      cfg.monitors.returns.push_back({c, c - 1, c + 1, -1, false});
      cfg.monitors.returns.push_back({c + 1, c, c + 2, -1, false});
    }
    if (!cfg.monitors.sums) cfg.monitors.sums = ConfinementSumsSpec{c - 2, c + 2};
    cfg.monitors.stop_when_fired = true;
  } else if (cfg.kind == "lemma-dominates") {
    const Vertex m = cfg.dominance_anchor;
    cfg.couple_a = m + 2 - cfg.dominance_span;
    cfg.couple_b = m + 2;
    cfg.couple_unbounded = false;
    if (!cfg.monitors.dominance) cfg.monitors.dominance = DominanceSpec{m};
  } else if (cfg.kind == "coupled") {
    if (!cfg.monitors.sums && !cfg.couple_unbounded)
      cfg.monitors.sums = ConfinementSumsSpec{cfg.couple_a, cfg.couple_b};
  }
  return cfg;
}

EstimateBlock walk_estimates(const ExperimentConfig& cfg, const WalkRun& run) {
  EstimateBlock est;
  est.range = estimate_range(run.trail);
  if (run.steps >= 2)
    est.essential = estimate_essential_range(run, cfg.window_fraction);

  // Five contiguous essentially-visited sites pin down a center; derive the
  // density summary and right-flank fit around it.
  if (est.essential && est.essential->size == 5 &&
      est.essential->sites.back() - est.essential->sites.front() == 4) {
    const Vertex k = est.essential->sites[2];
    const auto& occ = run.final_occupation;
    auto zof = [&occ](Vertex v) -> double {
      for (const auto& [site, z] : occ)
        if (site == v) return static_cast<double>(z);
      return 1.0;
    };
    const double n = static_cast<double>(run.steps);
    DensitySummary d;
    d.center = k;
    d.center_density = zof(k) / n;
    d.left_end_density = zof(k - 2) / n;
    d.right_end_density = zof(k + 2) / n;
    d.neighbor_density_twice = 2.0 * zof(k + 1) / n;
    d.right_flank_exponent = n > 1 ? std::log(zof(k + 2)) / std::log(n) : 0.0;
    d.linkage_gap = std::abs(d.right_flank_exponent - d.neighbor_density_twice);
    est.density = d;

    std::vector<std::pair<std::int64_t, double>> series;
    for (const auto& snap : run.trail.snapshots) {
      double z = 1.0;
      for (const auto& [site, zz] : snap.occupation)
        if (site == k + 2) z = static_cast<double>(zz);
      series.emplace_back(snap.n, z);
    }
    if (series.size() >= 4 &&
        static_cast<double>(series.back().first) >=
            100.0 * static_cast<double>(series.front().first)) {
      est.flank_fit = power_law_fit(series);
    }
  }
  return est;
}

EstimateBlock urn_estimates(const ExperimentConfig& cfg,
                            const UrnTrajectory& traj) {
  EstimateBlock est;
  est.final_fraction = traj.final_point.fraction();
  if (cfg.statistic_power_a)
    est.power_ratio = power_ratio_statistic(traj, *cfg.statistic_power_a);
  if (cfg.statistic_log_c)
    est.log_correction = log_correction_statistic(traj, *cfg.statistic_log_c);
  return est;
}

}  // namespace

ReplicateResult run_replicate(const ExperimentConfig& raw_config,
                              std::int64_t index) {
  const auto config = with_kind_defaults(raw_config);
  ReplicateResult result;
  result.seed = derive_replicate_seed(config.seed, static_cast<std::uint64_t>(index));
  result.kind = config.kind;
  result.horizon = config.horizon;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (index == config.fault_replicate)
      throw std::runtime_error("injected fault");
    SplitStream stream = SplitStream::from_key(result.seed);
    const auto schedule = config.checkpoints.resolve(config.horizon);

    if (config.kind == "walk" || config.kind == "errw" ||
        config.kind == "theorem3") {
      WalkConfig wc;
      wc.graph = config.graph.build();
      wc.start = config.start;
      wc.horizon = config.horizon;
      wc.checkpoints = schedule;
      wc.init = config.init;
      if (config.kind == "errw") {
        result.walk = run_errw(wc, stream);
      } else {
        MonitorBank bank(config.monitors);
        result.walk = run_walk(wc, stream, &bank);
        if (!bank.empty()) result.monitors = bank.report();
      }
      result.estimates = walk_estimates(config, *result.walk);
    } else if (config.kind == "urn") {
      UrnState init{config.urn.x, config.urn.y, 0};
      result.urn = run_urn(init, config.urn.rule, config.horizon, schedule, stream);
      result.estimates = urn_estimates(config, *result.urn);
    } else if (config.kind == "random-increment-urn") {
      UrnState init{config.urn.x, config.urn.y, 0};
      result.urn = run_random_increment_urn(init, config.increment.build(),
                                            config.horizon, schedule, stream);
      result.estimates = urn_estimates(config, *result.urn);
    } else if (config.kind == "coupled" || config.kind == "lemma-dominates") {
      CoupledConfig cc;
      cc.a = config.couple_a;
      cc.b = config.couple_b;
      cc.unbounded = config.couple_unbounded;
      cc.start = config.start;
      cc.horizon = config.horizon;
      cc.checkpoints = schedule;
      cc.init = config.init;
      const auto run = run_coupled(cc, stream, &config.monitors);
      result.coupled = CoupledSummary{run.tau, run.escape_side};
      result.walk = run.interval;
      result.coupled_full = run.full;
      result.monitors = run.interval_monitors;
      result.estimates = walk_estimates(config, *result.walk);
    } else {
      throw std::invalid_argument("unknown experiment kind: " + config.kind);
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

int resolve_workers(const ExperimentConfig& config, int override_value) {
  if (override_value > 0) return override_value;
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("REINFORCE_LAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const auto hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

ExperimentOutput run_experiment(const ExperimentConfig& config,
                                int workers_override) {
  config.validate();
  const int workers = resolve_workers(config, workers_override);

  ExperimentOutput output;
  output.config = config;
  output.results.resize(static_cast<std::size_t>(config.replicates));

  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= config.replicates) return;
      output.results[static_cast<std::size_t>(i)] = run_replicate(config, i);
    }
  };
  if (workers <= 1 || config.replicates == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n = std::min<std::int64_t>(workers, config.replicates);
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  output.summary = compute_summary(config, output.results);
  return output;
}

namespace {

double json_num(const ordered_json& j) { return j.get<double>(); }

// Largest recorded n at most horizon/10; reference point for
// "has it moved over the last decade" statistics.
std::int64_t decade_reference(const std::vector<std::int64_t>& ns,
                              std::int64_t horizon) {
  std::int64_t ref = -1;
  for (auto n : ns)
    if (n <= horizon / 10 && n > ref) ref = n;
  return ref;
}

}  // namespace

ordered_json compute_summary(const ExperimentConfig& config,
                             const std::vector<ReplicateResult>& results) {
  std::vector<ordered_json> objs;
  objs.reserve(results.size());
  for (const auto& r : results) objs.push_back(result_to_json(r));
  return compute_summary_from_objects(config, objs);
}

ordered_json compute_summary_from_objects(const ExperimentConfig& config,
                                          const std::vector<ordered_json>& objs) {
  ordered_json s;
  s["kind"] = config.kind;
  s["base_seed"] = config.seed;
  s["horizon"] = config.horizon;
  s["replicates"] = objs.size();
  s["rng"] = {{"name", std::string(SplitStream::kGeneratorName)},
              {"version", SplitStream::kGeneratorVersion}};

  std::int64_t failed = 0;
  for (const auto& o : objs)
    if (o.contains("error")) ++failed;
  s["failed"] = failed;

  const bool walk_like = config.kind == "walk" || config.kind == "errw" ||
                         config.kind == "theorem3" ||
                         config.kind == "coupled" ||
                         config.kind == "lemma-dominates";
  const bool urn_like =
      config.kind == "urn" || config.kind == "random-increment-urn";

  if (walk_like) {
    std::vector<double> range_sizes, essential_sizes;
    std::int64_t range_unchanged = 0, range_grew = 0, with_decade = 0;
    std::map<std::int64_t, std::int64_t> essential_counts;
    std::vector<double> center_density, endpoint_density, linkage;
    std::int64_t survived = 0, with_stops = 0;
    std::vector<double> v_delta;
    const Vertex v_anchor =
        config.monitors.stops ? config.monitors.stops->center : 0;

    for (const auto& o : objs) {
      if (o.contains("error")) continue;
      const auto& est = o.at("estimates");
      if (est.contains("range")) {
        const auto& range = est.at("range");
        range_sizes.push_back(json_num(range.at("size")));
        std::vector<std::int64_t> ns;
        for (const auto& pair : range.at("size_at"))
          ns.push_back(pair.at(0).get<std::int64_t>());
        const auto ref = decade_reference(ns, config.horizon);
        if (ref > 0) {
          ++with_decade;
          double ref_size = 0.0, last_size = 0.0;
          for (const auto& pair : range.at("size_at")) {
            if (pair.at(0).get<std::int64_t>() == ref)
              ref_size = json_num(pair.at(1));
            last_size = json_num(pair.at(1));
          }
          if (last_size == ref_size) ++range_unchanged;
          if (last_size > ref_size) ++range_grew;
        }
      }
      if (est.contains("essential_range")) {
        const auto sz = est.at("essential_range").at("size").get<std::int64_t>();
        essential_sizes.push_back(static_cast<double>(sz));
        essential_counts[sz] += 1;
      }
      if (est.contains("density")) {
        const auto& d = est.at("density");
        center_density.push_back(json_num(d.at("center_density")));
        endpoint_density.push_back(std::max(json_num(d.at("left_end_density")),
                                            json_num(d.at("right_end_density"))));
        linkage.push_back(json_num(d.at("linkage_gap")));
      }
      if (o.contains("monitors") && o.at("monitors").contains("stops")) {
        ++with_stops;
        if (!o.at("monitors").at("stops").at("survived").get<bool>()) continue;
        ++survived;
        // Drift of the center-return ratio over the trailing decade,
        // among survivors (the full checkpoint schedule was reached).
        if (!o.at("monitors").contains("returns")) continue;
        for (const auto& series : o.at("monitors").at("returns")) {
          if (series.at("anchor").get<Vertex>() != v_anchor) continue;
          const auto& cps = series.at("at_checkpoints");
          if (cps.size() < 2) break;
          // Entries are [checkpoint_n, visit, time, left_z, right_z].
          double last_ratio = 0.0, ref_ratio = 0.0;
          std::int64_t best_ref = -1;
          for (const auto& entry : cps) {
            const auto cp_n = entry.at(0).get<std::int64_t>();
            const double lz = json_num(entry.at(3));
            const double rz = json_num(entry.at(4));
            const double ratio = rz / (lz + rz);
            if (cp_n <= config.horizon / 10 && cp_n > best_ref) {
              best_ref = cp_n;
              ref_ratio = ratio;
            }
            last_ratio = ratio;
          }
          if (best_ref > 0)
            v_delta.push_back(std::abs(last_ratio - ref_ratio));
          break;
        }
      }
    }

    if (!range_sizes.empty()) {
      s["final_range_sizes"] = range_sizes;
      s["median_final_range"] = median(range_sizes);
      if (with_decade > 0) {
        s["range_unchanged_fraction"] =
            static_cast<double>(range_unchanged) / static_cast<double>(with_decade);
        s["range_grew_fraction"] =
            static_cast<double>(range_grew) / static_cast<double>(with_decade);
      }
    }
    if (!essential_sizes.empty()) {
      ordered_json counts = ordered_json::object();
      for (const auto& [sz, c] : essential_counts)
        counts[std::to_string(sz)] = c;
      s["essential_size_counts"] = counts;
      double in45 = 0.0;
      for (double v : essential_sizes)
        if (v == 4.0 || v == 5.0) in45 += 1.0;
      s["essential_in_4_or_5_fraction"] =
          in45 / static_cast<double>(essential_sizes.size());
    }
    if (!center_density.empty()) {
      s["five_site_count"] = center_density.size();
      s["five_site_center_density"] = center_density;
      s["five_site_endpoint_density"] = endpoint_density;
      s["five_site_linkage_gap"] = linkage;
    }
    if (with_stops > 0) {
      s["survival_fraction"] =
          static_cast<double>(survived) / static_cast<double>(with_stops);
      if (!v_delta.empty()) s["survivor_v_abs_delta"] = v_delta;
    }
  }

  if (urn_like) {
    std::vector<double> fractions, abs_centering;
    std::vector<double> log_ratio_final, statistic_delta, y_logn_ratio;
    for (const auto& o : objs) {
      if (o.contains("error")) continue;
      const auto& est = o.at("estimates");
      if (est.contains("final_fraction")) {
        const double f = json_num(est.at("final_fraction"));
        fractions.push_back(f);
        abs_centering.push_back(std::abs(f - 0.5));
      }
      if (est.contains("power_ratio") && !est.at("power_ratio").empty())
        log_ratio_final.push_back(json_num(est.at("power_ratio").back().at(2)));
      if (est.contains("log_correction") && est.at("log_correction").size() >= 2) {
        const auto& series = est.at("log_correction");
        std::vector<std::int64_t> ns;
        for (const auto& e : series) ns.push_back(e.at(0).get<std::int64_t>());
        const auto ref = decade_reference(ns, config.horizon);
        if (ref > 0) {
          double ref_v = 0.0;
          for (const auto& e : series)
            if (e.at(0).get<std::int64_t>() == ref) ref_v = json_num(e.at(1));
          statistic_delta.push_back(
              std::abs(json_num(series.back().at(1)) - ref_v));
        }
      }
      // Blue-mass scaling y log(n)/n compared across the trailing decade.
      if (o.contains("checkpoints") && o.at("checkpoints").size() >= 2 &&
          o.at("checkpoints").front().at("occupations").contains("y")) {
        const auto& cps = o.at("checkpoints");
        std::vector<std::int64_t> ns;
        for (const auto& e : cps) ns.push_back(e.at("n").get<std::int64_t>());
        const auto ref = decade_reference(ns, config.horizon);
        if (ref > 1) {
          double ref_v = 0.0, last_v = 0.0;
          for (const auto& e : cps) {
            const auto n = e.at("n").get<std::int64_t>();
            const double y = json_num(e.at("occupations").at("y"));
            const double val = y * std::log(static_cast<double>(n)) /
                               static_cast<double>(n);
            if (n == ref) ref_v = val;
            last_v = val;
          }
          if (ref_v > 0.0) y_logn_ratio.push_back(last_v / ref_v);
        }
      }
    }
    if (!fractions.empty()) {
      s["final_fractions"] = fractions;
      s["mean_fraction"] = mean(fractions);
      s["mean_abs_centering"] = mean(abs_centering);
      s["ks_uniform"] = ks_distance_uniform(fractions);
    }
    if (!log_ratio_final.empty()) s["log_ratio_final"] = log_ratio_final;
    if (!statistic_delta.empty()) s["statistic_abs_delta"] = statistic_delta;
    if (!y_logn_ratio.empty()) s["y_logn_over_n_ratio"] = y_logn_ratio;
  }

  if (config.kind == "coupled" || config.kind == "lemma-dominates") {
    std::int64_t survived = 0, total = 0;
    std::vector<double> taus;
    std::int64_t reached = 0, escaped_right_given_reached = 0,
                 held_given_reached = 0;
    for (const auto& o : objs) {
      if (o.contains("error")) continue;
      ++total;
      const auto tau = o.at("tau").get<std::int64_t>();
      if (tau < 0)
        ++survived;
      else
        taus.push_back(static_cast<double>(tau));
      if (o.contains("monitors") && o.at("monitors").contains("dominance")) {
        const auto& d = o.at("monitors").at("dominance");
        if (d.at("anchor_reached").get<bool>()) {
          ++reached;
          if (tau >= 0 && o.at("escape_side").get<int>() == 1)
            ++escaped_right_given_reached;
          if (d.at("square_held").get<bool>() && d.at("double_held").get<bool>())
            ++held_given_reached;
        }
      }
    }
    if (total > 0) {
      s["confinement_fraction"] =
          static_cast<double>(survived) / static_cast<double>(total);
      s["fired_taus"] = taus;
    }
    if (reached > 0) {
      s["anchor_reached_fraction"] =
          static_cast<double>(reached) / static_cast<double>(total);
      s["escape_given_reached_fraction"] =
          static_cast<double>(escaped_right_given_reached) /
          static_cast<double>(reached);
      s["conditions_held_given_reached_fraction"] =
          static_cast<double>(held_given_reached) / static_cast<double>(reached);
    }
  }

  return s;
}

std::vector<std::string> evaluate_checks(const ExperimentConfig& config,
                                         const ordered_json& summary) {
  std::vector<std::string> failures;
  for (const auto& check : config.checks) {
    // Dotted path into the summary object.
    const ordered_json* node = &summary;
    std::string rest = check.metric;
    bool found = true;
    while (!rest.empty()) {
      const auto dot = rest.find('.');
      const std::string head = rest.substr(0, dot);
      rest = dot == std::string::npos ? "" : rest.substr(dot + 1);
      if (!node->is_object() || !node->contains(head)) {
        found = false;
        break;
      }
      node = &node->at(head);
    }
    if (!found || !node->is_number()) {
      failures.push_back("metric not found: " + check.metric);
      continue;
    }
    const double v = node->get<double>();
    const bool ok = check.op == "le" ? v <= check.value : v >= check.value;
    if (!ok)
      failures.push_back(check.metric + " = " + std::to_string(v) + " violates " +
                         check.op + " " + std::to_string(check.value));
  }
  return failures;
}

}  // namespace reinforce
