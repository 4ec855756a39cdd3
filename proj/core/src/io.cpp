#include "reinforce/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace reinforce {

namespace {

using nlohmann::json;

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& context) {
  if (!j.is_object())
    throw std::invalid_argument("config section must be an object: " + context);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      throw std::invalid_argument("unknown config field \"" + key + "\" in " +
                                  context);
  }
}

GraphParams parse_graph(const json& j) {
  expect_keys(j, {"kind", "a", "b", "adjacency", "weights"}, "graph");
  GraphParams g;
  g.kind = j.value("kind", "line");
  g.a = j.value("a", static_cast<Vertex>(0));
  g.b = j.value("b", static_cast<Vertex>(0));
  if (j.contains("adjacency"))
    g.adjacency = j.at("adjacency").get<std::vector<std::vector<Vertex>>>();
  if (j.contains("weights"))
    for (const auto& w : j.at("weights"))
      g.weights.emplace_back(w.at(0).get<Vertex>(), w.at(1).get<Vertex>(),
                             w.at(2).get<double>());
  return g;
}

SyntheticInit parse_init(const json& j) {
  expect_keys(j, {"counts", "position"}, "init");
  SyntheticInit init;
  init.position = j.value("position", static_cast<Vertex>(0));
  if (!j.contains("counts"))
    throw std::invalid_argument("init requires a counts object");
  for (const auto& [key, value] : j.at("counts").items())
    init.counts[static_cast<Vertex>(std::stoll(key))] = value.get<std::int64_t>();
  return init;
}

MonitorConfig parse_monitors(const json& j) {
  expect_keys(j, {"stops", "returns", "dominance", "balance", "sums",
                  "stop_when_fired"},
              "monitors");
  MonitorConfig m;
  if (j.contains("stops")) {
    const auto& s = j.at("stops");
    expect_keys(s, {"band", "epsilon", "n0", "center"}, "monitors.stops");
    StopRules rules;
    if (s.contains("band")) {
      rules.band_lo = s.at("band").at(0).get<double>();
      rules.band_hi = s.at("band").at(1).get<double>();
    }
    rules.epsilon = s.value("epsilon", rules.epsilon);
    rules.n0 = s.value("n0", rules.n0);
    rules.center = s.value("center", rules.center);
    m.stops = rules;
  }
  if (j.contains("returns")) {
    for (const auto& r : j.at("returns")) {
      expect_keys(r, {"anchor", "left", "right", "stop_after", "keep_all"},
                  "monitors.returns");
      ReturnProcessSpec spec;
      spec.anchor = r.at("anchor").get<Vertex>();
      spec.left_site = r.value("left", spec.anchor - 1);
      spec.right_site = r.value("right", spec.anchor + 1);
      spec.stop_after = r.value("stop_after", static_cast<std::int64_t>(-1));
      spec.keep_all = r.value("keep_all", false);
      m.returns.push_back(spec);
    }
  }
  if (j.contains("dominance")) {
    expect_keys(j.at("dominance"), {"anchor"}, "monitors.dominance");
    m.dominance = DominanceSpec{j.at("dominance").at("anchor").get<Vertex>()};
  }
  if (j.contains("balance")) {
    expect_keys(j.at("balance"), {"base"}, "monitors.balance");
    m.balance = FourSiteBalanceSpec{j.at("balance").at("base").get<Vertex>()};
  }
  if (j.contains("sums")) {
    expect_keys(j.at("sums"), {"a", "b"}, "monitors.sums");
    m.sums = ConfinementSumsSpec{j.at("sums").at("a").get<Vertex>(),
                                 j.at("sums").at("b").get<Vertex>()};
  }
  m.stop_when_fired = j.value("stop_when_fired", false);
  return m;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  expect_keys(j,
              {"kind", "seed", "horizon", "replicates", "workers", "out",
               "format", "graph", "start", "checkpoints", "init",
               "quintuple_n0", "urn", "increment", "monitors",
               "window_fraction", "coupling", "anchor", "span", "statistic",
               "checks", "fault_replicate"},
              "config");
  ExperimentConfig c;
  c.kind = j.value("kind", "walk");
  c.seed = j.value("seed", static_cast<std::uint64_t>(1));
  c.horizon = j.value("horizon", static_cast<std::int64_t>(1));
  c.replicates = j.value("replicates", static_cast<std::int64_t>(1));
  c.workers = j.value("workers", 0);
  c.out = j.value("out", "");
  c.format = j.value("format", "both");
  if (j.contains("graph")) c.graph = parse_graph(j.at("graph"));
  c.start = j.value("start", static_cast<Vertex>(0));
  if (j.contains("checkpoints")) {
    const auto& cp = j.at("checkpoints");
    expect_keys(cp, {"kind", "ratio", "points"}, "checkpoints");
    c.checkpoints.kind = cp.value("kind", "geometric");
    c.checkpoints.ratio = cp.value("ratio", 2.0);
    if (cp.contains("points"))
      c.checkpoints.points = cp.at("points").get<std::vector<std::int64_t>>();
  }
  if (j.contains("init")) c.init = parse_init(j.at("init"));
  if (j.contains("quintuple_n0"))
    c.quintuple_n0 = j.at("quintuple_n0").get<std::int64_t>();
  if (j.contains("urn")) {
    const auto& u = j.at("urn");
    expect_keys(u, {"x", "y", "rule"}, "urn");
    c.urn.x = u.value("x", 1.0);
    c.urn.y = u.value("y", 1.0);
    if (u.contains("rule")) {
      const auto& r = u.at("rule");
      expect_keys(r, {"a", "b", "c", "d"}, "urn.rule");
      c.urn.rule = {r.value("a", 1.0), r.value("b", 0.0), r.value("c", 0.0),
                    r.value("d", 1.0)};
    }
  }
  if (j.contains("increment")) {
    const auto& inc = j.at("increment");
    expect_keys(inc, {"kind", "value", "p", "table", "mean_lo", "mean_hi",
                      "second_moment"},
                "increment");
    c.increment.kind = inc.value("kind", "deterministic");
    c.increment.value = inc.value("value", 2.0);
    c.increment.p = inc.value("p", 0.5);
    if (inc.contains("table"))
      c.increment.table =
          inc.at("table").get<std::vector<std::pair<double, double>>>();
    c.increment.mean_lo = inc.value("mean_lo", 0.0);
    c.increment.mean_hi = inc.value("mean_hi", 0.0);
    c.increment.second_moment = inc.value("second_moment", 0.0);
  }
  if (j.contains("monitors")) c.monitors = parse_monitors(j.at("monitors"));
  c.window_fraction = j.value("window_fraction", 0.5);
  if (j.contains("coupling")) {
    const auto& cp = j.at("coupling");
    expect_keys(cp, {"a", "b", "unbounded"}, "coupling");
    c.couple_a = cp.value("a", static_cast<Vertex>(-2));
    c.couple_b = cp.value("b", static_cast<Vertex>(2));
    c.couple_unbounded = cp.value("unbounded", false);
  }
  c.dominance_anchor = j.value("anchor", static_cast<Vertex>(2));
  c.dominance_span = j.value("span", static_cast<Vertex>(64));
  if (j.contains("statistic")) {
    const auto& st = j.at("statistic");
    expect_keys(st, {"power_a", "log_c"}, "statistic");
    if (st.contains("power_a")) c.statistic_power_a = st.at("power_a").get<double>();
    if (st.contains("log_c")) c.statistic_log_c = st.at("log_c").get<double>();
  }
  if (j.contains("checks")) {
    for (const auto& ch : j.at("checks")) {
      expect_keys(ch, {"metric", "op", "value"}, "checks");
      c.checks.push_back({ch.at("metric").get<std::string>(),
                          ch.at("op").get<std::string>(),
                          ch.at("value").get<double>()});
    }
  }
  c.fault_replicate = j.value("fault_replicate", static_cast<std::int64_t>(-1));
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

namespace {

ordered_json occupation_to_json(
    const std::vector<std::pair<Vertex, std::int64_t>>& occ) {
  ordered_json o = ordered_json::object();
  for (const auto& [site, z] : occ) o[std::to_string(site)] = z;
  return o;
}

ordered_json walk_checkpoints_json(const WalkRun& run) {
  ordered_json arr = ordered_json::array();
  for (const auto& snap : run.trail.snapshots) {
    ordered_json cp;
    cp["n"] = snap.n;
    cp["occupations"] = occupation_to_json(snap.occupation);
    cp["position"] = snap.position;
    arr.push_back(std::move(cp));
  }
  return arr;
}

ordered_json urn_checkpoints_json(const UrnTrajectory& traj) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : traj.points) {
    ordered_json cp;
    cp["n"] = p.n;
    cp["occupations"] = ordered_json{{"x", p.x}, {"y", p.y}};
    cp["position"] = nullptr;
    arr.push_back(std::move(cp));
  }
  return arr;
}

ordered_json sample_json(const ReturnSample& s) {
  return ordered_json::array({s.visit, s.time, s.left_z, s.right_z});
}

ordered_json estimates_json(const EstimateBlock& est) {
  ordered_json e = ordered_json::object();
  if (est.range) {
    ordered_json r;
    r["min"] = est.range->min_visited;
    r["max"] = est.range->max_visited;
    r["size"] = est.range->size;
    ordered_json sizes = ordered_json::array();
    for (const auto& [n, sz] : est.range->size_at)
      sizes.push_back(ordered_json::array({n, sz}));
    r["size_at"] = sizes;
    e["range"] = r;
  }
  if (est.essential) {
    ordered_json r;
    r["window_fraction"] = est.essential->window_fraction;
    r["window_start"] = est.essential->window_start;
    r["size"] = est.essential->size;
    r["sites"] = est.essential->sites;
    e["essential_range"] = r;
  }
  if (est.density) {
    ordered_json d;
    d["center"] = est.density->center;
    d["center_density"] = est.density->center_density;
    d["left_end_density"] = est.density->left_end_density;
    d["right_end_density"] = est.density->right_end_density;
    d["neighbor_density_twice"] = est.density->neighbor_density_twice;
    d["right_flank_exponent"] = est.density->right_flank_exponent;
    d["linkage_gap"] = est.density->linkage_gap;
    e["density"] = d;
  }
  if (est.flank_fit) {
    e["flank_fit"] = ordered_json{{"exponent", est.flank_fit->exponent},
                                  {"residual", est.flank_fit->residual},
                                  {"points", est.flank_fit->points_used}};
  }
  if (est.final_fraction) e["final_fraction"] = *est.final_fraction;
  if (!est.power_ratio.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : est.power_ratio)
      arr.push_back(ordered_json::array({p.n, p.x_over_y_pow, p.log_ratio}));
    e["power_ratio"] = arr;
  }
  if (!est.log_correction.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : est.log_correction)
      arr.push_back(ordered_json::array({p.n, p.statistic}));
    e["log_correction"] = arr;
  }
  return e;
}

ordered_json monitors_json(const MonitorReport& rep) {
  ordered_json m = ordered_json::object();
  if (rep.stops) {
    auto stop = [](const StopReport& r) {
      return ordered_json{{"fired", r.fired}, {"step", r.step}};
    };
    m["stops"] = ordered_json{{"band_exit", stop(rep.stops->band_exit)},
                              {"power_right", stop(rep.stops->power_right)},
                              {"power_left", stop(rep.stops->power_left)},
                              {"survived", rep.stops->survived()}};
  }
  if (!rep.returns.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& series : rep.returns) {
      ordered_json s;
      s["anchor"] = series.spec.anchor;
      s["left"] = series.spec.left_site;
      s["right"] = series.spec.right_site;
      s["visits"] = series.visits;
      ordered_json samples = ordered_json::array();
      for (const auto& sample : series.samples) samples.push_back(sample_json(sample));
      s["samples"] = samples;
      ordered_json cps = ordered_json::array();
      for (const auto& cp : series.at_checkpoints) {
        ordered_json row = ordered_json::array({cp.checkpoint_n});
        for (const auto& v : sample_json(cp.sample)) row.push_back(v);
        cps.push_back(std::move(row));
      }
      s["at_checkpoints"] = cps;
      arr.push_back(std::move(s));
    }
    m["returns"] = arr;
  }
  if (rep.dominance) {
    const auto& d = *rep.dominance;
    ordered_json held = ordered_json::array();
    for (const auto& [n, ok] : d.checkpoint_held)
      held.push_back(ordered_json::array({n, ok}));
    m["dominance"] = ordered_json{
        {"anchor_reached", d.anchor_reached},
        {"reach_step", d.reach_step},
        {"square_held", d.square_held},
        {"double_held", d.double_held},
        {"first_square_violation", d.first_square_violation},
        {"first_double_violation", d.first_double_violation},
        {"checkpoint_held", held}};
  }
  if (rep.balance) {
    const auto& b = *rep.balance;
    m["balance"] = ordered_json{{"observed", b.observed},
                                {"confined_from", b.confined_from},
                                {"confined_steps", b.confined_steps},
                                {"constant", b.balance_constant},
                                {"two_valued", b.two_valued},
                                {"first_violation", b.first_violation}};
  }
  if (rep.sums) {
    auto point = [](const ConfinementPoint& p) {
      return ordered_json::array({p.n, p.escape_sum, p.parts_sum,
                                  p.left_inner_density, p.right_inner_density});
    };
    ordered_json cps = ordered_json::array();
    for (const auto& p : rep.sums->at_checkpoints) cps.push_back(point(p));
    m["sums"] = ordered_json{{"a", rep.sums->spec.a},
                             {"b", rep.sums->spec.b},
                             {"at_checkpoints", cps},
                             {"final", point(rep.sums->final_point)}};
  }
  if (rep.stopped_early) {
    m["stopped_early"] = true;
    m["stopped_at"] = rep.stopped_at;
  }
  return m;
}

}  // namespace

ordered_json result_to_json(const ReplicateResult& r) {
  ordered_json o;
  o["seed"] = r.seed;
  o["kind"] = r.kind;
  o["horizon"] = r.horizon;
  if (r.walk)
    o["checkpoints"] = walk_checkpoints_json(*r.walk);
  else if (r.urn)
    o["checkpoints"] = urn_checkpoints_json(*r.urn);
  else
    o["checkpoints"] = ordered_json::array();
  o["estimates"] = estimates_json(r.estimates);
  o["monitors"] = r.monitors ? monitors_json(*r.monitors) : ordered_json::object();
  if (r.coupled) {
    o["tau"] = r.coupled->tau;
    o["escape_side"] = r.coupled->escape_side;
    if (r.coupled_full) {
      ordered_json full;
      full["final_position"] = r.coupled_full->final_position;
      full["occupations"] = occupation_to_json(r.coupled_full->final_occupation);
      o["full"] = full;
    }
  }
  if (r.urn) {
    o["urn_final"] = ordered_json{{"n", r.urn->final_point.n},
                                  {"x", r.urn->final_point.x},
                                  {"y", r.urn->final_point.y}};
  }
  if (r.walk && !r.walk->final_edge_occupation.empty())
    o["edges"] = occupation_to_json(r.walk->final_edge_occupation);
  o["wall_seconds"] = r.wall_seconds;
  if (r.failed) o["error"] = r.error;
  return o;
}

namespace {

// Atomic write: temp file in the destination directory, then rename.
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

void write_jsonl(const std::string& path,
                 const std::vector<ReplicateResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results to write");
  std::ostringstream out;
  for (const auto& r : results) out << result_to_json(r).dump() << '\n';
  write_atomic(path, out.str());
}

namespace {

void csv_walk_rows(std::ostringstream& out, std::size_t replicate,
                   const WalkRun& run) {
  // One row per finally-visited site per checkpoint; sites not yet touched
  // at a checkpoint count Z = 1.
  std::vector<Vertex> sites;
  for (const auto& [site, z] : run.final_occupation) sites.push_back(site);
  for (const auto& snap : run.trail.snapshots) {
    const double n = static_cast<double>(snap.n);
    const double log_n = snap.n > 1 ? std::log(n) : 0.0;
    for (Vertex site : sites) {
      std::int64_t z = 1;
      for (const auto& [s, zz] : snap.occupation)
        if (s == site) z = zz;
      const double density = static_cast<double>(z) / n;
      const double log_exp =
          log_n > 0.0 ? std::log(static_cast<double>(z)) / log_n : 0.0;
      out << replicate << ',' << snap.n << ',' << site << ',' << z << ','
          << density << ',' << log_exp << '\n';
    }
  }
}

void csv_urn_rows(std::ostringstream& out, std::size_t replicate,
                  const UrnTrajectory& traj) {
  for (const auto& p : traj.points) {
    const double total = p.x + p.y;
    const double log_n =
        p.n > 1 ? std::log(static_cast<double>(p.n)) : 0.0;
    const auto row = [&](int site, double mass) {
      out << replicate << ',' << p.n << ',' << site << ',' << mass << ','
          << mass / total << ','
          << (log_n > 0.0 ? std::log(mass) / log_n : 0.0) << '\n';
    };
    row(0, p.x);
    row(1, p.y);
  }
}

}  // namespace

void write_csv(const std::string& path,
               const std::vector<ReplicateResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results to write");
  std::ostringstream out;
  out << "replicate,n,site,Z,density,logExponent\n";
  out.precision(17);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.failed) continue;
    if (r.walk)
      csv_walk_rows(out, i, *r.walk);
    else if (r.urn)
      csv_urn_rows(out, i, *r.urn);
  }
  write_atomic(path, out.str());
}

void write_summary_json(const std::string& path, const ordered_json& summary) {
  write_atomic(path, summary.dump(2) + "\n");
}

void write_confinement_csv(const std::string& path,
                           const std::vector<ConfinementCurvePoint>& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "horizon,estimate,ci_low,ci_high\n";
  for (const auto& p : curve)
    out << p.horizon << ',' << p.estimate << ',' << p.ci_low << ','
        << p.ci_high << '\n';
  write_atomic(path, out.str());
}

void write_outputs(const ExperimentOutput& output) {
  if (output.config.out.empty())
    throw std::invalid_argument("no output path configured");
  const auto& fmt = output.config.format;
  if (fmt == "jsonl" || fmt == "both")
    write_jsonl(output.config.out + ".jsonl", output.results);
  if (fmt == "csv" || fmt == "both")
    write_csv(output.config.out + ".csv", output.results);
  write_summary_json(output.config.out + ".summary.json", output.summary);
}

ordered_json summary_from_jsonl(const ExperimentConfig& config,
                                const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw std::invalid_argument("cannot open: " + jsonl_path);
  std::vector<ordered_json> objs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    objs.push_back(ordered_json::parse(line));
  }
  return compute_summary_from_objects(config, objs);
}

}  // namespace reinforce
