#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reinforce/coupling.hpp"
#include "reinforce/estimators.hpp"
#include "reinforce/graph.hpp"
#include "reinforce/monitors.hpp"
#include "reinforce/urn.hpp"
#include "reinforce/walk.hpp"

namespace reinforce {

using ordered_json = nlohmann::ordered_json;

// Graph description as it appears in config files.
struct GraphParams {
  std::string kind = "line";  // line | interval | finite
  Vertex a = 0, b = 0;
  std::vector<std::vector<Vertex>> adjacency;
  std::vector<std::tuple<Vertex, Vertex, double>> weights;

  GraphSpec build() const;
};

struct UrnParams {
  double x = 1.0, y = 1.0;
  ReplacementRule rule;
};

struct IncrementParams {
  std::string kind = "deterministic";  // deterministic | geometric | table
  double value = 2.0;
  double p = 0.5;
  std::vector<std::pair<double, double>> table;
  double mean_lo = 0.0, mean_hi = 0.0, second_moment = 0.0;

  RandomIncrementSpec build() const;
};

struct CheckpointParams {
  std::string kind = "geometric";  // geometric | explicit
  double ratio = 2.0;
  std::vector<std::int64_t> points;

  std::vector<std::int64_t> resolve(std::int64_t horizon) const;
};

// Per-metric acceptance check evaluated against summary scalars in
// --check mode.
struct CheckSpec {
  std::string metric;
  std::string op;  // le | ge
  double value = 0.0;
};

struct ExperimentConfig {
  std::string kind = "walk";  // walk | errw | urn | random-increment-urn |
                              // coupled | theorem3 | lemma-dominates
  std::uint64_t seed = 1;
  std::int64_t horizon = 1;
  std::int64_t replicates = 1;
  int workers = 0;  // 0 -> REINFORCE_LAB_WORKERS or hardware default
  std::string out;  // output stem; empty -> no files written
  std::string format = "both";  // jsonl | csv | both

  GraphParams graph;
  Vertex start = 0;
  CheckpointParams checkpoints;
  std::optional<SyntheticInit> init;
  std::optional<std::int64_t> quintuple_n0;  // auto quintuple when set
  UrnParams urn;
  IncrementParams increment;
  MonitorConfig monitors;
  double window_fraction = 0.5;

  // coupled / lemma-dominates
  Vertex couple_a = -2, couple_b = 2;
  bool couple_unbounded = false;
  Vertex dominance_anchor = 2;
  Vertex dominance_span = 64;  // left cut below the anchor for restricted runs

  // urn statistic parameters
  std::optional<double> statistic_power_a;
  std::optional<double> statistic_log_c;

  std::vector<CheckSpec> checks;
  std::int64_t fault_replicate = -1;

  void validate() const;
};

// Quintuple of prescribed counts at sites center-2..center+2 matched to the
// steering band: inner counts track n0/2 and n0(lo+hi)/4, the flanks stay
// minimal.
SyntheticInit default_quintuple(std::int64_t n0, double band_lo, double band_hi,
                                Vertex center = 0);

struct DensitySummary {
  Vertex center = 0;
  double center_density = 0.0;
  double left_end_density = 0.0;
  double right_end_density = 0.0;
  double neighbor_density_twice = 0.0;  // 2 Z(n, center+1) / n
  double right_flank_exponent = 0.0;    // log Z(n, center+2) / log n
  double linkage_gap = 0.0;
};

struct EstimateBlock {
  std::optional<RangeEstimate> range;
  std::optional<EssentialRangeEstimate> essential;
  std::optional<DensitySummary> density;
  std::optional<PowerLawFit> flank_fit;
  std::optional<double> final_fraction;  // urn fraction or loop-epoch ratio
  std::vector<PowerRatioPoint> power_ratio;
  std::vector<LogCorrectionPoint> log_correction;
};

struct CoupledSummary {
  std::int64_t tau = -1;
  int escape_side = 0;
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  std::string kind;
  std::int64_t horizon = 0;
  double wall_seconds = 0.0;
  bool failed = false;
  std::string error;

  std::optional<WalkRun> walk;           // walk | errw | theorem3 (interval)
  std::optional<UrnTrajectory> urn;      // urn kinds
  std::optional<CoupledSummary> coupled; // coupled | lemma-dominates
  std::optional<WalkRun> coupled_full;   // full-line marginal
  std::optional<MonitorReport> monitors;
  EstimateBlock estimates;
};

struct ExperimentOutput {
  ExperimentConfig config;
  std::vector<ReplicateResult> results;
  ordered_json summary;
};

// Runs all replicates on a worker pool (each replicate owns its state and a
// seed derived from base seed + index), then reduces in index order, so the
// output is independent of the worker count. A replicate that throws is
// flagged and excluded from aggregates without affecting the others.
ExperimentOutput run_experiment(const ExperimentConfig& config,
                                int workers_override = 0);

// Single replicate, exactly as the pool runs it.
ReplicateResult run_replicate(const ExperimentConfig& config,
                              std::int64_t index);

int resolve_workers(const ExperimentConfig& config, int override_value);

// Aggregation is defined over the JSONL representation of replicates, so a
// summary recomputed from a written file matches the in-memory one exactly.
ordered_json compute_summary(const ExperimentConfig& config,
                             const std::vector<ReplicateResult>& results);
ordered_json compute_summary_from_objects(const ExperimentConfig& config,
                                          const std::vector<ordered_json>& objs);

// Evaluates config checks against a summary; returns failure messages.
std::vector<std::string> evaluate_checks(const ExperimentConfig& config,
                                         const ordered_json& summary);

}  // namespace reinforce
