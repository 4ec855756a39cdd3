#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reinforce/walk.hpp"

namespace reinforce {

// First-crossing stop rules steering a localization run around `center`:
//   band_exit   fires at the least n >= n0 with 2 Z(n, center+1)/n outside
//               [band_lo, band_hi];
//   power_right fires at the least n >= n0 with Z(n, center+2) >= n^(1-epsilon);
//   power_left  same on the left flank, Z(n, center-2).
struct StopRules {
  double band_lo = 0.45;
  double band_hi = 0.55;
  double epsilon = 0.005;
  std::int64_t n0 = 10'000;
  Vertex center = 0;

  void validate() const;
};

struct StopReport {
  bool fired = false;
  std::int64_t step = -1;
};

struct StopRulesReport {
  StopReport band_exit;
  StopReport power_right;
  StopReport power_left;
  bool survived() const {
    return !band_exit.fired && !power_right.fired && !power_left.fired;
  }
  std::int64_t earliest() const;  // -1 when survived
};

// Records the occupation counts of two flanking sites at every visit to an
// anchor vertex. For anchor 0 with sites (-1, +1) this carries the
// center-return ratio process; for anchor 1 with sites (0, 2) it carries the
// urn-like pair driving the flank power law.
struct ReturnProcessSpec {
  Vertex anchor = 0;
  Vertex left_site = -1;
  Vertex right_site = 1;
  std::int64_t stop_after = -1;  // early-stop after this many visits (if > 0)
  bool keep_all = false;         // keep every sample (small runs only)
};

struct ReturnSample {
  std::int64_t visit = 0;  // 0 = first time seen at the anchor
  std::int64_t time = 0;
  std::int64_t left_z = 1;
  std::int64_t right_z = 1;

  double ratio() const {
    return static_cast<double>(right_z) / static_cast<double>(left_z + right_z);
  }
};

struct ReturnCheckpoint {
  std::int64_t checkpoint_n = 0;
  ReturnSample sample;  // last anchor visit at or before the checkpoint
};

struct ReturnSeries {
  ReturnProcessSpec spec;
  std::int64_t visits = 0;
  // Dyadically thinned visit samples (all of them when keep_all).
  std::vector<ReturnSample> samples;
  std::vector<ReturnCheckpoint> at_checkpoints;
};

// Flank-domination conditions around anchor m, active from the first visit
// to m: (square) Z(n,m) >= Z(n,m+2)^2 and (double) Z(n,m-1) >= 2 Z(n,m+1),
// required at every step once active.
struct DominanceSpec {
  Vertex anchor = 0;
};

struct DominanceReport {
  bool anchor_reached = false;
  std::int64_t reach_step = -1;
  bool square_held = true;
  bool double_held = true;
  std::int64_t first_square_violation = -1;
  std::int64_t first_double_violation = -1;
  std::vector<std::pair<std::int64_t, bool>> checkpoint_held;  // (n, both ok so far)
  bool held() const { return anchor_reached && square_held && double_held; }
};

// Alternating balance over a 4-site window {base..base+3}: on any stretch
// confined to the window, Z(base)-Z(base+1)+Z(base+2)-Z(base+3) takes the
// value K at odd offsets and K+1 at even offsets, for a path constant K.
struct FourSiteBalanceSpec {
  Vertex base = -2;
};

struct FourSiteBalanceReport {
  bool observed = false;          // walk entered the window at all
  std::int64_t confined_from = -1;  // start of the trailing confined stretch
  std::int64_t confined_steps = 0;
  std::int64_t balance_constant = 0;  // K of the trailing stretch
  bool two_valued = true;
  std::int64_t first_violation = -1;
};

// Boundary statistics of a trajectory relative to J = [a, b]:
//   escape_sum = sum over n of 1{X_n=a}/Z(n,a+1) + 1{X_n=b}/Z(n,b-1)
//   parts_sum  = sum over n>=1 of (Z(n,a)+Z(n,b))/n^2
// both non-decreasing in n and recorded at every checkpoint, together with
// the inner-density proxies Z(n,a+1)/n and Z(n,b-1)/n.
struct ConfinementSumsSpec {
  Vertex a = 0;
  Vertex b = 0;
};

struct ConfinementPoint {
  std::int64_t n = 0;
  double escape_sum = 0.0;
  double parts_sum = 0.0;
  double left_inner_density = 0.0;
  double right_inner_density = 0.0;
};

struct ConfinementSumsReport {
  ConfinementSumsSpec spec;
  std::vector<ConfinementPoint> at_checkpoints;
  ConfinementPoint final_point;
};

struct MonitorConfig {
  std::optional<StopRules> stops;
  std::vector<ReturnProcessSpec> returns;
  std::optional<DominanceSpec> dominance;
  std::optional<FourSiteBalanceSpec> balance;
  std::optional<ConfinementSumsSpec> sums;
  bool stop_when_fired = false;  // end the run when any stop rule fires
};

struct MonitorReport {
  std::optional<StopRulesReport> stops;
  std::vector<ReturnSeries> returns;
  std::optional<DominanceReport> dominance;
  std::optional<FourSiteBalanceReport> balance;
  std::optional<ConfinementSumsReport> sums;
  bool stopped_early = false;
  std::int64_t stopped_at = -1;
};

class MonitorBank {
 public:
  MonitorBank() = default;
  explicit MonitorBank(MonitorConfig config);  // throws on inconsistent params

  bool empty() const { return !active_; }

  void begin(const WalkState& state);
  void on_step(const WalkState& state);
  void on_checkpoint(const WalkState& state);
  bool stop_requested() const { return stop_requested_; }

  // Called by the runner with the terminal state; report() is valid after.
  void finalize(const WalkState& state);
  const MonitorReport& report() const { return report_; }

 private:
  void check_stops(const WalkState& state);

  MonitorConfig config_;
  bool active_ = false;
  bool stop_requested_ = false;

  StopRulesReport stops_;
  bool power_checked_ = false;
  std::vector<ReturnSeries> returns_;
  std::vector<ReturnSample> latest_returns_;
  DominanceReport dominance_;
  FourSiteBalanceReport balance_;
  std::int64_t balance_window_entered_ = -1;
  bool balance_have_constant_ = false;
  ConfinementSumsReport sums_;
  double escape_sum_ = 0.0;
  double parts_sum_ = 0.0;
  MonitorReport report_;
};

// Rebuilds occupation counts along a recorded path and evaluates the bank on
// it, exactly as a live run would. `path` must include the starting position.
MonitorReport replay_monitors(const GraphSpec& graph,
                              const std::vector<Vertex>& path,
                              const MonitorConfig& config);

}  // namespace reinforce
