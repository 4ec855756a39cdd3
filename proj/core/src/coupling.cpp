#include "reinforce/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reinforce {

namespace {

void advance(WalkState& state, Vertex next) {
  ++state.n;
  state.position = next;
  state.occ.record_visit(next, state.n);
}

Vertex line_move(const WalkState& s, double u) {
  const double wl = static_cast<double>(s.occ.z_raw(s.position - 1));
  const double wr = static_cast<double>(s.occ.z_raw(s.position + 1));
  return (u < wl / (wl + wr)) ? s.position - 1 : s.position + 1;
}

Vertex interval_move(const WalkState& s, Vertex a, Vertex b, double u) {
  if (s.position == a) return a + 1;
  if (s.position == b) return b - 1;
  return line_move(s, u);
}

void snapshot_into(WalkRun& run, const WalkState& state) {
  CheckpointSnapshot snap;
  snap.n = state.n;
  snap.position = state.position;
  snap.occupation = state.occ.visited_counts();
  run.trail.snapshots.push_back(std::move(snap));
}

void finalize_into(WalkRun& run, const WalkState& state, std::int64_t horizon) {
  run.steps = state.n;
  run.final_position = state.position;
  run.final_occupation = state.occ.visited_counts();
  run.final_last_visit = state.occ.visited_last_times();
  run.stopped_early = state.n < horizon;
}

}  // namespace

CoupledRun run_coupled(const CoupledConfig& config, SplitStream& rng,
                       const MonitorConfig* interval_monitors) {
  if (config.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!config.unbounded && config.a >= config.b)
    throw std::invalid_argument("coupling interval requires a < b");

  const auto line = GraphSpec::integer_line();
  const auto interval_graph = config.unbounded
                                  ? GraphSpec::integer_line()
                                  : GraphSpec::interval(config.a, config.b);
  if (!config.unbounded &&
      (config.start < config.a || config.start > config.b))
    throw std::invalid_argument("start must lie inside the interval");

  auto schedule = config.checkpoints;
  if (schedule.empty()) {
    schedule = geometric_checkpoints(config.horizon);
  } else {
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    if (schedule.front() < 1 || schedule.back() > config.horizon)
      throw std::invalid_argument("checkpoint outside [1, horizon]");
    if (schedule.back() != config.horizon) schedule.push_back(config.horizon);
  }

  SplitStream shared = rng.split(0);   // drives the full walk throughout
  SplitStream post_tau = rng.split(1); // drives the interval walk past tau

  WalkState full = config.init ? config.init->build(line)
                               : WalkState::fresh(line, config.start);
  WalkState intv = config.init ? config.init->build(interval_graph)
                               : WalkState::fresh(interval_graph, config.start);
  if (full.n >= config.horizon)
    throw std::invalid_argument("horizon must exceed the injected step count");

  MonitorBank bank;
  if (interval_monitors) bank = MonitorBank(*interval_monitors);
  const bool watched = !bank.empty();
  if (watched) bank.begin(intv);

  CoupledRun run;
  run.full.trail.schedule = schedule;
  run.interval.trail.schedule = schedule;
  if (config.record_paths) {
    run.full.path.push_back(full.position);
    run.interval.path.push_back(intv.position);
  }

  std::size_t next_cp = 0;
  while (next_cp < schedule.size() && schedule[next_cp] <= full.n) ++next_cp;
  while (full.n < config.horizon) {
    if (run.tau < 0) {
      const double u = shared.next_double();
      const Vertex next_full = line_move(full, u);
      Vertex next_int = next_full;
      if (!config.unbounded &&
          (next_full == config.a - 1 || next_full == config.b + 1)) {
        run.tau = full.n + 1;
        run.escape_side = next_full < config.a ? -1 : +1;
        next_int = next_full < config.a ? config.a + 1 : config.b - 1;
      }
      advance(full, next_full);
      advance(intv, next_int);
    } else {
      advance(full, line_move(full, shared.next_double()));
      const double u = post_tau.next_double();
      advance(intv, interval_move(intv, config.a, config.b, u));
    }
    if (config.record_paths) {
      run.full.path.push_back(full.position);
      run.interval.path.push_back(intv.position);
    }
    if (watched) {
      bank.on_step(intv);
      if (bank.stop_requested()) break;
    }
    if (full.n == schedule[next_cp]) {
      snapshot_into(run.full, full);
      snapshot_into(run.interval, intv);
      if (watched) bank.on_checkpoint(intv);
      if (++next_cp == schedule.size()) break;
    }
  }

  finalize_into(run.full, full, config.horizon);
  finalize_into(run.interval, intv, config.horizon);
  if (watched) {
    bank.finalize(intv);
    run.interval_monitors = bank.report();
  }
  return run;
}

PathBoundarySums boundary_sums(const std::vector<Vertex>& path, Vertex a,
                               Vertex b) {
  if (a >= b) throw std::invalid_argument("boundary sums need a < b");
  MonitorConfig cfg;
  cfg.sums = ConfinementSumsSpec{a, b};
  const auto report =
      replay_monitors(GraphSpec::integer_line(), path, cfg);
  return {report.sums->final_point.escape_sum,
          report.sums->final_point.parts_sum};
}

ConfinementProbability estimate_confinement_prob(const CoupledConfig& config,
                                                 std::int64_t replicates,
                                                 SplitStream& rng) {
  if (replicates < 30)
    throw std::invalid_argument("confinement estimate needs >= 30 replicates");

  std::int64_t survived = 0;
  for (std::int64_t r = 0; r < replicates; ++r) {
    SplitStream stream = rng.split(static_cast<std::uint64_t>(r));
    if (config.unbounded) {
      ++survived;  // no boundary exists, tau cannot fire
      continue;
    }
    // Only tau matters here; stop the replicate as soon as it fires.
    CoupledConfig c = config;
    c.record_paths = false;
    SplitStream shared = stream.split(0);
    WalkState full = c.init ? c.init->build(GraphSpec::integer_line())
                            : WalkState::fresh(GraphSpec::integer_line(), c.start);
    bool escaped = false;
    while (full.n < c.horizon) {
      const Vertex next = line_move(full, shared.next_double());
      advance(full, next);
      if (next == c.a - 1 || next == c.b + 1) {
        escaped = true;
        break;
      }
    }
    if (!escaped) ++survived;
  }

  ConfinementProbability out;
  out.survived = survived;
  out.replicates = replicates;
  const double n = static_cast<double>(replicates);
  const double p = static_cast<double>(survived) / n;
  out.estimate = p;
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  out.ci_low = std::max(0.0, center - half);
  out.ci_high = std::min(1.0, center + half);
  return out;
}

}  // namespace reinforce
