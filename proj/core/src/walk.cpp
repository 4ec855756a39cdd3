#include "reinforce/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reinforce/monitors.hpp"

namespace reinforce {

namespace {

// Inverse-CDF pick over neighbors in increasing vertex order: the first
// neighbor whose cumulative probability exceeds u wins. Falls back to the
// last positive-weight neighbor so floating slack at u ~ 1 cannot escape
// the support.
Vertex pick_neighbor(const WalkState& state, const GraphSpec& graph, double u) {
  const auto nbrs = graph.neighbors(state.position);
  double total = 0.0;
  for (Vertex w : nbrs)
    total += graph.edge_weight(state.position, w) *
             static_cast<double>(state.occ.z(w));
  if (total <= 0.0) throw std::runtime_error("stuck vertex");
  double cum = 0.0;
  Vertex chosen = state.position;
  bool found = false;
  for (Vertex w : nbrs) {
    const double weight = graph.edge_weight(state.position, w) *
                          static_cast<double>(state.occ.z(w));
    if (weight <= 0.0) continue;
    chosen = w;
    found = true;
    cum += weight / total;
    if (u < cum) break;
  }
  if (!found) throw std::runtime_error("stuck vertex");
  return chosen;
}

void advance(WalkState& state, Vertex next) {
  if (state.n == std::numeric_limits<std::int64_t>::max())
    throw std::overflow_error("step counter overflow");
  ++state.n;
  state.position = next;
  state.occ.record_visit(next, state.n);
}

}  // namespace

WalkState SyntheticInit::build(const GraphSpec& graph) const {
  if (counts.empty()) throw std::invalid_argument("empty synthetic init");
  std::int64_t visits = 0;
  for (const auto& [v, z] : counts) {
    if (!graph.contains(v))
      throw std::invalid_argument("injected site outside the graph");
    if (z < 1) throw std::invalid_argument("injected count must be >= 1");
    visits += z - 1;
  }
  if (visits < 1) throw std::invalid_argument("synthetic init carries no visits");
  if (counts.find(position) == counts.end() || counts.at(position) < 2)
    throw std::invalid_argument("synthetic init must cover the current position");
  graph.validate_start(position);

  WalkState s;
  s.position = s.start = position;
  s.occ = OccupationTable(position);
  s.n = visits - 1;  // conservation: sum(Z-1) = n + 1
  for (const auto& [v, z] : counts) s.occ.inject(v, z, s.n);
  return s;
}

std::vector<TransitionEntry> transition_distribution(const WalkState& state,
                                                     const GraphSpec& graph) {
  const auto nbrs = graph.neighbors(state.position);
  if (nbrs.empty()) throw std::runtime_error("stuck vertex");
  double total = 0.0;
  for (Vertex w : nbrs)
    total += graph.edge_weight(state.position, w) *
             static_cast<double>(state.occ.z(w));
  if (total <= 0.0) throw std::runtime_error("stuck vertex");
  std::vector<TransitionEntry> out;
  out.reserve(nbrs.size());
  for (Vertex w : nbrs) {
    const double weight = graph.edge_weight(state.position, w) *
                          static_cast<double>(state.occ.z(w));
    out.push_back({w, weight / total});
  }
  return out;
}

void step_inplace(WalkState& state, const GraphSpec& graph, SplitStream& rng) {
  const double u = rng.next_double();
  advance(state, pick_neighbor(state, graph, u));
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon,
                                                double ratio) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (ratio <= 1.0) throw std::invalid_argument("checkpoint ratio must be > 1");
  std::vector<std::int64_t> out;
  double x = 1.0;
  std::int64_t last = 0;
  while (true) {
    const auto n = std::max<std::int64_t>(last + 1,
                                          static_cast<std::int64_t>(std::llround(x)));
    if (n >= horizon) break;
    out.push_back(n);
    last = n;
    x *= ratio;
  }
  out.push_back(horizon);
  return out;
}

namespace {

std::vector<std::int64_t> resolve_schedule(const WalkConfig& config) {
  if (config.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (config.checkpoints.empty()) return geometric_checkpoints(config.horizon);
  auto sched = config.checkpoints;
  std::sort(sched.begin(), sched.end());
  sched.erase(std::unique(sched.begin(), sched.end()), sched.end());
  if (sched.front() < 1 || sched.back() > config.horizon)
    throw std::invalid_argument("checkpoint outside [1, horizon]");
  if (sched.back() != config.horizon) sched.push_back(config.horizon);
  return sched;
}

// Checkpoints at or before an injected history are unreachable.
std::size_t first_reachable(const std::vector<std::int64_t>& schedule,
                            std::int64_t n) {
  std::size_t i = 0;
  while (i < schedule.size() && schedule[i] <= n) ++i;
  return i;
}

void snapshot(CheckpointTrail& trail, const WalkState& state) {
  CheckpointSnapshot snap;
  snap.n = state.n;
  snap.position = state.position;
  snap.occupation = state.occ.visited_counts();
  trail.snapshots.push_back(std::move(snap));
}

void finalize(WalkRun& run, const WalkState& state, std::int64_t horizon) {
  run.steps = state.n;
  run.final_position = state.position;
  run.final_occupation = state.occ.visited_counts();
  run.final_last_visit = state.occ.visited_last_times();
  run.stopped_early = state.n < horizon;
}

}  // namespace

WalkRun run_walk(const WalkConfig& config, SplitStream& rng,
                 MonitorBank* monitors) {
  const auto schedule = resolve_schedule(config);
  WalkState state = config.init ? config.init->build(config.graph)
                                : WalkState::fresh(config.graph, config.start);
  if (state.n >= config.horizon)
    throw std::invalid_argument("horizon must exceed the injected step count");

  WalkRun run;
  run.trail.schedule = schedule;
  if (config.record_path) run.path.push_back(state.position);
  if (monitors && !monitors->empty()) monitors->begin(state);

  const bool fast_line =
      !config.graph.has_weights() &&
      (config.graph.kind() == GraphKind::IntegerLine ||
       config.graph.kind() == GraphKind::Interval) &&
      !config.record_path;
  const bool watched = monitors && !monitors->empty();
  const Vertex lo = config.graph.lo(), hi = config.graph.hi();
  const bool bounded = config.graph.kind() == GraphKind::Interval;

  std::size_t next_cp = first_reachable(schedule, state.n);
  while (state.n < config.horizon) {
    if (fast_line) {
      const Vertex pos = state.position;
      const bool can_left = !bounded || pos > lo;
      const bool can_right = !bounded || pos < hi;
      Vertex next;
      if (can_left && can_right) {
        const double wl = static_cast<double>(state.occ.z_raw(pos - 1));
        const double wr = static_cast<double>(state.occ.z_raw(pos + 1));
        const double u = rng.next_double();
        next = (u < wl / (wl + wr)) ? pos - 1 : pos + 1;
      } else {
        rng.next_double();  // forced move still consumes its draw
        next = can_left ? pos - 1 : pos + 1;
      }
      advance(state, next);
    } else {
      step_inplace(state, config.graph, rng);
      if (config.record_path) run.path.push_back(state.position);
    }

    if (watched) {
      monitors->on_step(state);
      if (monitors->stop_requested()) break;
    }
    if (state.n == schedule[next_cp]) {
      snapshot(run.trail, state);
      if (watched) monitors->on_checkpoint(state);
      if (++next_cp == schedule.size()) break;
    }
  }

  if (watched) monitors->finalize(state);
  finalize(run, state, config.horizon);
  return run;
}

WalkRun run_errw(const WalkConfig& config, SplitStream& rng) {
  if (config.graph.kind() == GraphKind::Finite)
    throw std::invalid_argument("edge-reinforced walk needs the line or an interval");
  if (config.init)
    throw std::invalid_argument("synthetic init is not supported for the edge walk");
  const auto schedule = resolve_schedule(config);
  config.graph.validate_start(config.start);

  WalkState state = WalkState::fresh(config.graph, config.start);
  // Edge counts keyed by left endpoint: edge {v, v+1} lives at index v.
  OccupationTable edges(config.start);

  WalkRun run;
  run.trail.schedule = schedule;
  if (config.record_path) run.path.push_back(state.position);

  const bool bounded = config.graph.kind() == GraphKind::Interval;
  const Vertex lo = config.graph.lo(), hi = config.graph.hi();

  std::size_t next_cp = 0;
  while (state.n < config.horizon) {
    const Vertex pos = state.position;
    const bool can_left = !bounded || pos > lo;
    const bool can_right = !bounded || pos < hi;
    Vertex next;
    if (can_left && can_right) {
      const double wl = static_cast<double>(edges.z(pos - 1));
      const double wr = static_cast<double>(edges.z(pos));
      const double u = rng.next_double();
      next = (u < wl / (wl + wr)) ? pos - 1 : pos + 1;
    } else {
      rng.next_double();
      next = can_left ? pos - 1 : pos + 1;
    }
    edges.record_visit(std::min(pos, next), state.n + 1);
    advance(state, next);
    if (config.record_path) run.path.push_back(state.position);

    if (state.n == schedule[next_cp]) {
      snapshot(run.trail, state);
      if (++next_cp == schedule.size()) break;
    }
  }

  finalize(run, state, config.horizon);
  run.final_edge_occupation = edges.visited_counts();
  return run;
}

}  // namespace reinforce
