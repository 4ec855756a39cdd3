#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "reinforce/rng.hpp"

namespace reinforce {

// Two-color urn with real-valued masses; balls need not be integral.
struct UrnState {
  double x = 1.0;  // red mass
  double y = 1.0;  // blue mass
  std::int64_t n = 0;

  double fraction() const { return x / (x + y); }
};

// Replacement matrix: a red draw adds (a, b), a blue draw adds (c, d).
struct ReplacementRule {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  void validate() const {
    if (a < 0 || b < 0 || c < 0 || d < 0)
      throw std::invalid_argument("replacement entries must be >= 0");
  }
  bool grows_both() const { return (a + c) > 0 && (b + d) > 0; }
};

// One draw: red with probability x/(x+y) (checked first under the single
// uniform), blue otherwise.
UrnState urn_step(UrnState state, const ReplacementRule& rule, SplitStream& rng);

// Law of the red increment W in the random-increment urn: a red draw adds a
// fresh W > 0 to the red mass, a blue draw adds 1 to the blue mass. The
// declared conditional-mean interval and second-moment bound are verified at
// construction.
struct RandomIncrementSpec {
  enum class Kind { Deterministic, Geometric, Table };

  Kind kind = Kind::Deterministic;
  double value = 2.0;          // Deterministic: W == value
  double success_p = 0.5;      // Geometric on {1,2,...}: P(W=k) = (1-p)^(k-1) p
  std::vector<std::pair<double, double>> table;  // (value, probability)
  double mean_lo = 0.0, mean_hi = 0.0;  // declared E[W] interval
  double second_moment_bound = 0.0;     // declared E[W^2] cap

  static RandomIncrementSpec deterministic(double w, double mean_lo,
                                           double mean_hi, double k);
  static RandomIncrementSpec geometric(double p, double mean_lo, double mean_hi,
                                       double k);
  static RandomIncrementSpec empirical(std::vector<std::pair<double, double>> t,
                                       double mean_lo, double mean_hi, double k);

  double mean() const;
  double second_moment() const;
  // Inversion from a single uniform; deterministic under seed.
  double sample(SplitStream& rng) const;

 private:
  void validate() const;
};

struct UrnPoint {
  std::int64_t n = 0;
  double x = 0.0;
  double y = 0.0;

  double fraction() const { return x / (x + y); }
};

struct UrnTrajectory {
  std::vector<std::int64_t> schedule;
  std::vector<UrnPoint> points;  // one per schedule entry
  UrnPoint final_point;
};

std::vector<std::int64_t> urn_checkpoints(std::int64_t horizon);

UrnTrajectory run_urn(UrnState init, const ReplacementRule& rule,
                      std::int64_t horizon,
                      std::vector<std::int64_t> checkpoints, SplitStream& rng);

UrnTrajectory run_random_increment_urn(UrnState init,
                                       const RandomIncrementSpec& spec,
                                       std::int64_t horizon,
                                       std::vector<std::int64_t> checkpoints,
                                       SplitStream& rng);

// Growth-exponent diagnostics for urns whose red mass grows polynomially in
// the blue mass: reports x/y^a and log x / log y at each checkpoint.
struct PowerRatioPoint {
  std::int64_t n = 0;
  double x_over_y_pow = 0.0;
  double log_ratio = 0.0;  // log x / log y
};
std::vector<PowerRatioPoint> power_ratio_statistic(const UrnTrajectory& t,
                                                   double a);

// Log-correction diagnostic x/(c y) - log y for urns whose blue mass grows
// like n / log n.
struct LogCorrectionPoint {
  std::int64_t n = 0;
  double statistic = 0.0;
};
std::vector<LogCorrectionPoint> log_correction_statistic(const UrnTrajectory& t,
                                                         double c);

// Empirical per-step drift and quadratic variation of a scalar statistic
// across an ensemble of trajectories sharing one checkpoint schedule,
// binned between consecutive checkpoints, with cumulative sums.
struct IncrementBin {
  std::int64_t n_lo = 0;
  std::int64_t n_hi = 0;
  double mean_increment_per_step = 0.0;     // empirical drift
  double mean_square_increment_per_step = 0.0;  // empirical quadratic variation
  double cumulative_drift = 0.0;       // sum of per-bin mean increments
  double cumulative_quadratic = 0.0;   // sum of per-bin mean squared increments
};
std::vector<IncrementBin> increment_diagnostic(
    const std::vector<std::vector<double>>& statistic_per_replicate,
    const std::vector<std::int64_t>& schedule);

}  // namespace reinforce
