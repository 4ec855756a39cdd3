#include "reinforce/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reinforce {

void StopRules::validate() const {
  if (!(0.0 < band_lo && band_lo < band_hi && band_hi < 1.0))
    throw std::invalid_argument("stop band must satisfy 0 < lo < hi < 1");
  const double cap =
      std::min({band_lo, 1.0 - band_hi, band_hi - band_lo}) / 10.0;
  if (!(epsilon > 0.0) || epsilon > cap)
    throw std::invalid_argument(
        "inconsistent stop parameters: need 0 < epsilon <= min{lo, 1-hi, hi-lo}/10");
  if (n0 < 1) throw std::invalid_argument("stop activation step must be >= 1");
}

std::int64_t StopRulesReport::earliest() const {
  std::int64_t e = -1;
  for (const auto* r : {&band_exit, &power_right, &power_left}) {
    if (r->fired && (e < 0 || r->step < e)) e = r->step;
  }
  return e;
}

namespace {

bool keep_sample(std::int64_t visit, bool keep_all) {
  if (keep_all || visit < 64) return true;
  return (visit & (visit - 1)) == 0;  // powers of two
}

ReturnSample make_sample(const ReturnProcessSpec& spec, const WalkState& s,
                         std::int64_t visit) {
  return {visit, s.n, s.occ.z(spec.left_site), s.occ.z(spec.right_site)};
}

}  // namespace

MonitorBank::MonitorBank(MonitorConfig config) : config_(std::move(config)) {
  if (config_.stops) config_.stops->validate();
  for (const auto& spec : config_.returns) {
    if (spec.left_site == spec.right_site)
      throw std::invalid_argument("return process needs two distinct sites");
    ReturnSeries series;
    series.spec = spec;
    returns_.push_back(std::move(series));
  }
  latest_returns_.resize(returns_.size());
  if (config_.sums && config_.sums->a >= config_.sums->b)
    throw std::invalid_argument("confinement sums need a < b");
  active_ = config_.stops || !config_.returns.empty() || config_.dominance ||
            config_.balance || config_.sums;
}

void MonitorBank::check_stops(const WalkState& state) {
  const auto& p = *config_.stops;
  if (state.n < p.n0) return;
  auto& rep = stops_;

  if (!rep.band_exit.fired) {
    const double twice_z = 2.0 * static_cast<double>(state.occ.z(p.center + 1));
    const double n = static_cast<double>(state.n);
    if (twice_z < p.band_lo * n || twice_z > p.band_hi * n)
      rep.band_exit = {true, state.n};
  }
  // The power thresholds grow with n, so a crossing can only happen when the
  // flank count itself just grew (or at activation).
  const bool at_activation = state.n == p.n0 || !power_checked_;
  if (!rep.power_right.fired &&
      (at_activation || state.position == p.center + 2)) {
    const double thr = std::pow(static_cast<double>(state.n), 1.0 - p.epsilon);
    if (static_cast<double>(state.occ.z(p.center + 2)) >= thr)
      rep.power_right = {true, state.n};
  }
  if (!rep.power_left.fired &&
      (at_activation || state.position == p.center - 2)) {
    const double thr = std::pow(static_cast<double>(state.n), 1.0 - p.epsilon);
    if (static_cast<double>(state.occ.z(p.center - 2)) >= thr)
      rep.power_left = {true, state.n};
  }
  power_checked_ = true;

  if (config_.stop_when_fired && !rep.survived()) stop_requested_ = true;
}

void MonitorBank::begin(const WalkState& state) {
  if (!active_) return;
  on_step(state);
}

void MonitorBank::on_step(const WalkState& state) {
  if (config_.stops) check_stops(state);

  for (std::size_t i = 0; i < returns_.size(); ++i) {
    auto& series = returns_[i];
    if (state.position != series.spec.anchor) continue;
    const auto visit = series.visits++;
    const auto sample = make_sample(series.spec, state, visit);
    if (keep_sample(visit, series.spec.keep_all)) series.samples.push_back(sample);
    latest_returns_[i] = sample;
    if (series.spec.stop_after > 0 && visit >= series.spec.stop_after)
      stop_requested_ = true;
  }

  if (config_.dominance) {
    const Vertex m = config_.dominance->anchor;
    auto& rep = dominance_;
    if (!rep.anchor_reached) {
      if (state.position == m) {
        rep.anchor_reached = true;
        rep.reach_step = state.n;
      }
    }
    if (rep.anchor_reached &&
        (state.n == rep.reach_step || state.position == m + 1 ||
         state.position == m + 2)) {
      const auto zm = state.occ.z(m);
      const auto z2 = state.occ.z(m + 2);
      if (rep.square_held && zm < z2 * z2) {
        rep.square_held = false;
        rep.first_square_violation = state.n;
      }
      if (rep.double_held && state.occ.z(m - 1) < 2 * state.occ.z(m + 1)) {
        rep.double_held = false;
        rep.first_double_violation = state.n;
      }
    }
  }

  if (config_.balance) {
    const Vertex base = config_.balance->base;
    const Vertex offset = state.position - base;
    auto& rep = balance_;
    if (offset < 0 || offset > 3) {
      balance_window_entered_ = -1;
      balance_have_constant_ = false;
    } else {
      rep.observed = true;
      if (balance_window_entered_ < 0) {
        balance_window_entered_ = state.n;
        rep.confined_from = state.n;
        rep.confined_steps = 0;
        rep.two_valued = true;
        rep.first_violation = -1;
      }
      const std::int64_t s = state.occ.z(base) - state.occ.z(base + 1) +
                             state.occ.z(base + 2) - state.occ.z(base + 3);
      const std::int64_t k_obs = s - ((offset % 2 == 0) ? 1 : 0);
      if (!balance_have_constant_) {
        rep.balance_constant = k_obs;
        balance_have_constant_ = true;
      } else if (k_obs != rep.balance_constant && rep.two_valued) {
        rep.two_valued = false;
        rep.first_violation = state.n;
      }
      ++rep.confined_steps;
    }
  }

  if (config_.sums) {
    const auto [a, b] = *config_.sums;
    if (state.position == a)
      escape_sum_ += 1.0 / static_cast<double>(state.occ.z(a + 1));
    else if (state.position == b)
      escape_sum_ += 1.0 / static_cast<double>(state.occ.z(b - 1));
    if (state.n >= 1) {
      const double n = static_cast<double>(state.n);
      parts_sum_ +=
          static_cast<double>(state.occ.z(a) + state.occ.z(b)) / (n * n);
    }
  }
}

namespace {

ConfinementPoint make_point(const ConfinementSumsSpec& spec, const WalkState& s,
                            double escape, double parts) {
  const double n = static_cast<double>(std::max<std::int64_t>(s.n, 1));
  return {s.n, escape, parts,
          static_cast<double>(s.occ.z(spec.a + 1)) / n,
          static_cast<double>(s.occ.z(spec.b - 1)) / n};
}

}  // namespace

void MonitorBank::on_checkpoint(const WalkState& state) {
  if (config_.sums)
    sums_.at_checkpoints.push_back(
        make_point(*config_.sums, state, escape_sum_, parts_sum_));
  if (config_.dominance && dominance_.anchor_reached)
    dominance_.checkpoint_held.emplace_back(
        state.n, dominance_.square_held && dominance_.double_held);
  for (std::size_t i = 0; i < returns_.size(); ++i) {
    if (returns_[i].visits > 0)
      returns_[i].at_checkpoints.push_back({state.n, latest_returns_[i]});
  }
}

void MonitorBank::finalize(const WalkState& state) {
  MonitorReport report;
  if (config_.stops) report.stops = stops_;
  for (std::size_t i = 0; i < returns_.size(); ++i) {
    auto series = returns_[i];
    if (series.visits > 0) {
      const auto& last = latest_returns_[i];
      if (series.samples.empty() || series.samples.back().visit != last.visit)
        series.samples.push_back(last);
    }
    report.returns.push_back(std::move(series));
  }
  if (config_.dominance) report.dominance = dominance_;
  if (config_.balance) report.balance = balance_;
  if (config_.sums) {
    sums_.spec = *config_.sums;
    sums_.final_point = make_point(*config_.sums, state, escape_sum_, parts_sum_);
    report.sums = sums_;
  }
  report.stopped_early = stop_requested_;
  report.stopped_at = stop_requested_ ? state.n : -1;
  report_ = std::move(report);
}

MonitorReport replay_monitors(const GraphSpec& graph,
                              const std::vector<Vertex>& path,
                              const MonitorConfig& config) {
  if (path.empty()) throw std::invalid_argument("empty path");
  MonitorBank bank(config);
  WalkState state = WalkState::fresh(graph, path.front());
  bank.begin(state);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!graph.adjacent(path[i - 1], path[i]))
      throw std::invalid_argument("replay path violates adjacency");
    ++state.n;
    state.position = path[i];
    state.occ.record_visit(path[i], state.n);
    bank.on_step(state);
    if (bank.stop_requested()) break;
  }
  bank.finalize(state);
  return bank.report();
}

}  // namespace reinforce
