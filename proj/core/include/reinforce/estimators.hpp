#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reinforce/monitors.hpp"
#include "reinforce/walk.hpp"

namespace reinforce {

// Visited-set summary. On the line the visited set is an interval, so
// min/max determine it.
struct RangeEstimate {
  Vertex min_visited = 0;
  Vertex max_visited = 0;
  std::int64_t size = 0;
  // |R| as of each checkpoint, in schedule order.
  std::vector<std::pair<std::int64_t, std::int64_t>> size_at;
};

RangeEstimate estimate_range(const CheckpointTrail& trail);

// Sites still visited during the trailing window (windowFraction*horizon,
// horizon]; the finite-horizon stand-in for "visited infinitely often".
struct EssentialRangeEstimate {
  double window_fraction = 0.5;
  std::int64_t window_start = 0;
  std::vector<Vertex> sites;  // increasing
  std::int64_t size = 0;
};

EssentialRangeEstimate estimate_essential_range(const WalkRun& run,
                                                double window_fraction = 0.5);

// Per-site occupation densities and log-scale exponents at each checkpoint.
struct DensityPoint {
  Vertex site = 0;
  double density = 0.0;       // Z(n, site) / n
  double log_exponent = 0.0;  // log Z(n, site) / log n (0 when n <= 1)
};
struct DensityProfile {
  std::vector<std::int64_t> schedule;
  std::vector<std::vector<DensityPoint>> per_checkpoint;
};

DensityProfile density_profile(const CheckpointTrail& trail);

// Least-squares slope of log Z against log n over the trailing half of the
// checkpoints. Requires >= 4 points spanning >= 2 decades.
struct PowerLawFit {
  double exponent = 0.0;
  double residual = 0.0;  // RMS residual of the fitted line
  std::size_t points_used = 0;
};

PowerLawFit power_law_fit(
    const std::vector<std::pair<std::int64_t, double>>& series);

// Pulls the recorded anchor-return process out of a monitored run. Fails if
// no return monitor was attached for the anchor (sparse checkpoints cannot
// reconstruct it) or the anchor was seen fewer than twice.
struct ReturnTimeProcess {
  ReturnProcessSpec spec;
  std::int64_t visits = 0;
  std::vector<ReturnSample> samples;             // visit 0 onward
  std::vector<ReturnCheckpoint> at_checkpoints;  // latest sample per checkpoint
};

ReturnTimeProcess extract_return_process(const MonitorReport& report,
                                         Vertex anchor);

}  // namespace reinforce
