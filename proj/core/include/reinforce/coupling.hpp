#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reinforce/monitors.hpp"
#include "reinforce/walk.hpp"

namespace reinforce {

// Joint construction of a full-line walk and an interval walk on J = [a, b]:
// the two paths coincide strictly before tau, the first time the full path
// steps outside J; at tau the interval path reflects (a-1 -> a+1,
// b+1 -> b-1); afterwards the interval path evolves on its own substream.
struct CoupledConfig {
  Vertex a = -2;
  Vertex b = 2;
  bool unbounded = false;  // sentinel: no boundary, tau can never fire
  Vertex start = 0;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> checkpoints;
  std::optional<SyntheticInit> init;  // shared pre-history for both paths
  bool record_paths = false;
};

struct CoupledRun {
  std::int64_t tau = -1;  // -1: never fired within the horizon
  int escape_side = 0;    // -1 left (a-1), +1 right (b+1), 0 none
  WalkRun full;
  WalkRun interval;
  MonitorReport interval_monitors;
};

// The caller's stream splits into substream 0 (drives the full walk; before
// tau it drives both) and substream 1 (drives the interval walk after tau).
CoupledRun run_coupled(const CoupledConfig& config, SplitStream& rng,
                       const MonitorConfig* interval_monitors = nullptr);

// Boundary statistics of a recorded path relative to J = [a, b], evaluated
// by replay. Checkpoint-resolved versions come from ConfinementSumsSpec
// monitors during live runs.
struct PathBoundarySums {
  double escape_sum = 0.0;
  double parts_sum = 0.0;
};
PathBoundarySums boundary_sums(const std::vector<Vertex>& path, Vertex a,
                               Vertex b);

// Fraction of coupled replicates whose tau exceeds the horizon, with a
// Wilson 95% confidence interval.
struct ConfinementProbability {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t survived = 0;
  std::int64_t replicates = 0;
};

ConfinementProbability estimate_confinement_prob(const CoupledConfig& config,
                                                 std::int64_t replicates,
                                                 SplitStream& rng);

}  // namespace reinforce
