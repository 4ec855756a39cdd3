#include "reinforce/urn.hpp"

#include <algorithm>
#include <cmath>

#include "reinforce/walk.hpp"

namespace reinforce {

UrnState urn_step(UrnState state, const ReplacementRule& rule,
                  SplitStream& rng) {
  const double total = state.x + state.y;
  if (!(total > 0.0)) throw std::runtime_error("degenerate urn");
  const double u = rng.next_double();
  if (u < state.x / total) {
    state.x += rule.a;
    state.y += rule.b;
  } else {
    state.x += rule.c;
    state.y += rule.d;
  }
  ++state.n;
  return state;
}

RandomIncrementSpec RandomIncrementSpec::deterministic(double w, double mean_lo,
                                                       double mean_hi,
                                                       double k) {
  RandomIncrementSpec s;
  s.kind = Kind::Deterministic;
  s.value = w;
  s.mean_lo = mean_lo;
  s.mean_hi = mean_hi;
  s.second_moment_bound = k;
  s.validate();
  return s;
}

RandomIncrementSpec RandomIncrementSpec::geometric(double p, double mean_lo,
                                                   double mean_hi, double k) {
  RandomIncrementSpec s;
  s.kind = Kind::Geometric;
  s.success_p = p;
  s.mean_lo = mean_lo;
  s.mean_hi = mean_hi;
  s.second_moment_bound = k;
  s.validate();
  return s;
}

RandomIncrementSpec RandomIncrementSpec::empirical(
    std::vector<std::pair<double, double>> t, double mean_lo, double mean_hi,
    double k) {
  RandomIncrementSpec s;
  s.kind = Kind::Table;
  s.table = std::move(t);
  s.mean_lo = mean_lo;
  s.mean_hi = mean_hi;
  s.second_moment_bound = k;
  s.validate();
  return s;
}

double RandomIncrementSpec::mean() const {
  switch (kind) {
    case Kind::Deterministic:
      return value;
    case Kind::Geometric:
      return 1.0 / success_p;
    case Kind::Table: {
      double m = 0.0;
      for (const auto& [v, p] : table) m += v * p;
      return m;
    }
  }
  return 0.0;
}

double RandomIncrementSpec::second_moment() const {
  switch (kind) {
    case Kind::Deterministic:
      return value * value;
    case Kind::Geometric:
      return (2.0 - success_p) / (success_p * success_p);
    case Kind::Table: {
      double m = 0.0;
      for (const auto& [v, p] : table) m += v * v * p;
      return m;
    }
  }
  return 0.0;
}

void RandomIncrementSpec::validate() const {
  switch (kind) {
    case Kind::Deterministic:
      if (!(value > 0.0))
        throw std::invalid_argument("deterministic increment must be > 0");
      break;
    case Kind::Geometric:
      if (!(success_p > 0.0) || success_p > 1.0)
        throw std::invalid_argument("geometric parameter must lie in (0, 1]");
      break;
    case Kind::Table: {
      if (table.empty()) throw std::invalid_argument("empty increment table");
      double mass = 0.0;
      for (const auto& [v, p] : table) {
        if (!(v > 0.0)) throw std::invalid_argument("increment values must be > 0");
        if (p < 0.0) throw std::invalid_argument("table probabilities must be >= 0");
        mass += p;
      }
      if (std::abs(mass - 1.0) > 1e-12)
        throw std::invalid_argument("table probabilities must sum to 1");
      break;
    }
  }
  if (!(mean_lo > 0.0) || mean_lo > mean_hi)
    throw std::invalid_argument("declared mean interval must satisfy 0 < lo <= hi");
  const double m = mean();
  if (m < mean_lo - 1e-12 || m > mean_hi + 1e-12)
    throw std::invalid_argument("increment mean outside the declared interval");
  if (second_moment() > second_moment_bound + 1e-12)
    throw std::invalid_argument("increment second moment exceeds the declared bound");
}

double RandomIncrementSpec::sample(SplitStream& rng) const {
  switch (kind) {
    case Kind::Deterministic:
      return value;
    case Kind::Geometric: {
      if (success_p >= 1.0) return 1.0;
      const double u = rng.next_double();
      const double w =
          std::ceil(std::log1p(-u) / std::log1p(-success_p));
      return std::max(1.0, w);
    }
    case Kind::Table: {
      const double u = rng.next_double();
      double cum = 0.0;
      double last = table.back().first;
      for (const auto& [v, p] : table) {
        cum += p;
        if (u < cum) return v;
      }
      return last;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<std::int64_t> urn_checkpoints(std::int64_t horizon) {
  return geometric_checkpoints(horizon);
}

namespace {

std::vector<std::int64_t> resolve_urn_schedule(
    std::int64_t horizon, std::vector<std::int64_t> checkpoints) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (checkpoints.empty()) return urn_checkpoints(horizon);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  if (checkpoints.front() < 1 || checkpoints.back() > horizon)
    throw std::invalid_argument("checkpoint outside [1, horizon]");
  if (checkpoints.back() != horizon) checkpoints.push_back(horizon);
  return checkpoints;
}

template <class StepFn>
UrnTrajectory drive_urn(UrnState state, std::int64_t horizon,
                        std::vector<std::int64_t> checkpoints, StepFn&& step) {
  if (!(state.x > 0.0) || !(state.y > 0.0))
    throw std::invalid_argument("urn masses must start positive");
  UrnTrajectory traj;
  traj.schedule = resolve_urn_schedule(horizon, std::move(checkpoints));
  traj.points.reserve(traj.schedule.size());
  std::size_t next_cp = 0;
  while (state.n < horizon) {
    step(state);
    if (state.n == traj.schedule[next_cp]) {
      traj.points.push_back({state.n, state.x, state.y});
      if (++next_cp == traj.schedule.size()) break;
    }
  }
  traj.final_point = {state.n, state.x, state.y};
  return traj;
}

}  // namespace

UrnTrajectory run_urn(UrnState init, const ReplacementRule& rule,
                      std::int64_t horizon,
                      std::vector<std::int64_t> checkpoints, SplitStream& rng) {
  rule.validate();
  return drive_urn(init, horizon, std::move(checkpoints),
                   [&](UrnState& s) { s = urn_step(s, rule, rng); });
}

UrnTrajectory run_random_increment_urn(UrnState init,
                                       const RandomIncrementSpec& spec,
                                       std::int64_t horizon,
                                       std::vector<std::int64_t> checkpoints,
                                       SplitStream& rng) {
  return drive_urn(init, horizon, std::move(checkpoints), [&](UrnState& s) {
    const double total = s.x + s.y;
    if (!(total > 0.0)) throw std::runtime_error("degenerate urn");
    const double u = rng.next_double();
    if (u < s.x / total) {
      const double w = spec.sample(rng);
      if (!(w > 0.0)) throw std::runtime_error("increment sampler returned w <= 0");
      s.x += w;
    } else {
      s.y += 1.0;
    }
    ++s.n;
  });
}

std::vector<PowerRatioPoint> power_ratio_statistic(const UrnTrajectory& t,
                                                   double a) {
  std::vector<PowerRatioPoint> out;
  out.reserve(t.points.size());
  for (const auto& p : t.points) {
    if (!(p.y > 1.0))
      throw std::domain_error("power ratio statistic needs y > 1 at checkpoints");
    out.push_back({p.n, p.x / std::pow(p.y, a), std::log(p.x) / std::log(p.y)});
  }
  return out;
}

std::vector<LogCorrectionPoint> log_correction_statistic(const UrnTrajectory& t,
                                                         double c) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be > 0");
  std::vector<LogCorrectionPoint> out;
  out.reserve(t.points.size());
  for (const auto& p : t.points) {
    if (!(p.y > 0.0)) throw std::domain_error("log correction needs y > 0");
    out.push_back({p.n, p.x / (c * p.y) - std::log(p.y)});
  }
  return out;
}

std::vector<IncrementBin> increment_diagnostic(
    const std::vector<std::vector<double>>& statistic_per_replicate,
    const std::vector<std::int64_t>& schedule) {
  if (statistic_per_replicate.size() < 100)
    throw std::invalid_argument("increment diagnostic needs >= 100 replicates");
  if (schedule.size() < 2)
    throw std::invalid_argument("increment diagnostic needs >= 2 checkpoints");
  for (const auto& series : statistic_per_replicate)
    if (series.size() != schedule.size())
      throw std::invalid_argument("replicate series must share the schedule");

  std::vector<IncrementBin> bins;
  bins.reserve(schedule.size() - 1);
  double cum_drift = 0.0, cum_quad = 0.0;
  for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
    const double steps = static_cast<double>(schedule[k + 1] - schedule[k]);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& series : statistic_per_replicate) {
      const double inc = series[k + 1] - series[k];
      sum += inc;
      sum_sq += inc * inc;
    }
    const double n_rep = static_cast<double>(statistic_per_replicate.size());
    IncrementBin bin;
    bin.n_lo = schedule[k];
    bin.n_hi = schedule[k + 1];
    bin.mean_increment_per_step = sum / n_rep / steps;
    bin.mean_square_increment_per_step = sum_sq / n_rep / steps;
    cum_drift += sum / n_rep;
    cum_quad += sum_sq / n_rep;
    bin.cumulative_drift = cum_drift;
    bin.cumulative_quadratic = cum_quad;
    bins.push_back(bin);
  }
  return bins;
}

}  // namespace reinforce
