#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "reinforce/graph.hpp"
#include "reinforce/rng.hpp"

namespace reinforce {

class MonitorBank;
struct MonitorReport;

// Augmented occupation counts over a contiguous vertex window. Sites outside
// the window implicitly count 1 (never visited). The window always covers
// [min_visited-1, max_visited+1] so the nearest-neighbor hot loop can read
// both neighbors unchecked.
class OccupationTable {
 public:
  OccupationTable(Vertex origin, std::size_t reserve_radius = 8) {
    base_ = origin - static_cast<Vertex>(reserve_radius);
    z_.assign(2 * reserve_radius + 1, 1);
    last_.assign(2 * reserve_radius + 1, -1);
    min_visited_ = max_visited_ = origin;
  }

  std::int64_t z(Vertex v) const {
    const auto i = v - base_;
    if (i < 0 || i >= static_cast<Vertex>(z_.size())) return 1;
    return z_[static_cast<std::size_t>(i)];
  }

  std::int64_t last_visit(Vertex v) const {
    const auto i = v - base_;
    if (i < 0 || i >= static_cast<Vertex>(z_.size())) return -1;
    return last_[static_cast<std::size_t>(i)];
  }

  // Unchecked read; valid for v in [min_visited-1, max_visited+1].
  std::int64_t z_raw(Vertex v) const {
    return z_[static_cast<std::size_t>(v - base_)];
  }

  void record_visit(Vertex v, std::int64_t time) {
    ensure_margin(v);
    const auto i = static_cast<std::size_t>(v - base_);
    ++z_[i];
    last_[i] = time;
    if (v < min_visited_) min_visited_ = v;
    if (v > max_visited_) max_visited_ = v;
  }

  // Synthetic history injection: sets Z(v) = count directly and stamps the
  // last visit at `time` (counts >= 2 mark the site as visited).
  void inject(Vertex v, std::int64_t count, std::int64_t time) {
    if (count < 1) throw std::invalid_argument("injected count must be >= 1");
    ensure_margin(v);
    const auto i = static_cast<std::size_t>(v - base_);
    z_[i] = count;
    if (count >= 2) {
      last_[i] = time;
      if (v < min_visited_) min_visited_ = v;
      if (v > max_visited_) max_visited_ = v;
    }
  }

  Vertex min_visited() const { return min_visited_; }
  Vertex max_visited() const { return max_visited_; }

  // Visited sites (Z >= 2) with counts, in increasing vertex order.
  std::vector<std::pair<Vertex, std::int64_t>> visited_counts() const {
    std::vector<std::pair<Vertex, std::int64_t>> out;
    for (Vertex v = min_visited_; v <= max_visited_; ++v) {
      const auto zz = z_raw(v);
      if (zz >= 2) out.emplace_back(v, zz);
    }
    return out;
  }

  std::vector<std::pair<Vertex, std::int64_t>> visited_last_times() const {
    std::vector<std::pair<Vertex, std::int64_t>> out;
    for (Vertex v = min_visited_; v <= max_visited_; ++v) {
      if (z_raw(v) >= 2) out.emplace_back(v, last_[static_cast<std::size_t>(v - base_)]);
    }
    return out;
  }

  // Sum of (Z - 1) over all sites; equals the total number of visits.
  std::int64_t total_visits() const {
    std::int64_t s = 0;
    for (auto zz : z_) s += zz - 1;
    return s;
  }

 private:
  void ensure_margin(Vertex v) {
    if (v - 1 < base_) {
      const auto grow = static_cast<std::size_t>(base_ - (v - 1)) + 32;
      z_.insert(z_.begin(), grow, 1);
      last_.insert(last_.begin(), grow, -1);
      base_ -= static_cast<Vertex>(grow);
    }
    const auto need = v + 1 - base_;
    if (need >= static_cast<Vertex>(z_.size())) {
      z_.resize(static_cast<std::size_t>(need) + 32, 1);
      last_.resize(static_cast<std::size_t>(need) + 32, -1);
    }
  }

  std::vector<std::int64_t> z_;
  std::vector<std::int64_t> last_;
  Vertex base_ = 0;
  Vertex min_visited_ = 0;
  Vertex max_visited_ = 0;
};

struct WalkState {
  std::int64_t n = 0;
  Vertex position = 0;
  Vertex start = 0;
  OccupationTable occ{0};

  // Fresh walk: one visit at time 0, so Z(start) = 2 and every other site
  // counts 1.
  static WalkState fresh(const GraphSpec& graph, Vertex start) {
    graph.validate_start(start);
    WalkState s;
    s.position = s.start = start;
    s.occ = OccupationTable(start);
    s.occ.record_visit(start, 0);
    return s;
  }
};

// Prescribed occupation counts standing in for an unspecified history. The
// step counter is derived from conservation: n = sum(z_i - 1) - 1.
struct SyntheticInit {
  std::map<Vertex, std::int64_t> counts;
  Vertex position = 0;

  WalkState build(const GraphSpec& graph) const;
};

struct TransitionEntry {
  Vertex vertex;
  double probability;
};

// Neighbor distribution at the current position: probability of moving to x
// is lambda(pos, x) * Z(n, x), normalized over the neighbors of pos.
// Throws "stuck vertex" if no neighbor has positive weight.
std::vector<TransitionEntry> transition_distribution(const WalkState& state,
                                                     const GraphSpec& graph);

// Advances one step in place, consuming exactly one uniform draw. Sampling is
// inverse-CDF over neighbors in increasing vertex order.
void step_inplace(WalkState& state, const GraphSpec& graph, SplitStream& rng);

inline WalkState step(WalkState state, const GraphSpec& graph, SplitStream& rng) {
  step_inplace(state, graph, rng);
  return state;
}

struct CheckpointSnapshot {
  std::int64_t n = 0;
  Vertex position = 0;
  std::vector<std::pair<Vertex, std::int64_t>> occupation;  // visited sites
};

struct CheckpointTrail {
  std::vector<std::int64_t> schedule;
  std::vector<CheckpointSnapshot> snapshots;
};

// Default checkpoint schedule: powers of `ratio` capped by and including the
// horizon.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon,
                                                double ratio = 2.0);

struct WalkConfig {
  GraphSpec graph = GraphSpec::integer_line();
  Vertex start = 0;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> checkpoints;  // empty -> geometric_checkpoints
  std::optional<SyntheticInit> init;
  bool record_path = false;  // tests only; keeps every position in memory
};

struct WalkRun {
  CheckpointTrail trail;
  std::int64_t steps = 0;  // may stop early when a monitor requests it
  Vertex final_position = 0;
  std::vector<std::pair<Vertex, std::int64_t>> final_occupation;
  std::vector<std::pair<Vertex, std::int64_t>> final_last_visit;
  std::vector<std::pair<Vertex, std::int64_t>> final_edge_occupation;  // ERRW
  std::vector<Vertex> path;  // record_path only (includes X_0)
  bool stopped_early = false;
};

// Vertex-reinforced walk. Monitors, when given, see the time-0 state, every
// post-step state, and every checkpoint; a monitor may request early stop.
WalkRun run_walk(const WalkConfig& config, SplitStream& rng,
                 MonitorBank* monitors = nullptr);

// Edge-reinforced comparison walk on the line or an interval. Reinforcement
// counts live on undirected edges (keyed by left endpoint in the results);
// vertex visits are still tracked for range statistics.
WalkRun run_errw(const WalkConfig& config, SplitStream& rng);

}  // namespace reinforce
