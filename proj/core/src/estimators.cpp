#include "reinforce/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reinforce {

RangeEstimate estimate_range(const CheckpointTrail& trail) {
  if (trail.snapshots.empty())
    throw std::invalid_argument("range estimate needs at least one checkpoint");
  RangeEstimate est;
  const auto& last = trail.snapshots.back().occupation;
  est.min_visited = last.front().first;
  est.max_visited = last.back().first;
  est.size = static_cast<std::int64_t>(last.size());
  for (const auto& snap : trail.snapshots)
    est.size_at.emplace_back(snap.n,
                             static_cast<std::int64_t>(snap.occupation.size()));
  return est;
}

EssentialRangeEstimate estimate_essential_range(const WalkRun& run,
                                                double window_fraction) {
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0))
    throw std::invalid_argument("window fraction must lie in (0, 1)");
  if (run.steps < 2)
    throw std::invalid_argument("essential range needs a horizon >= 2");
  EssentialRangeEstimate est;
  est.window_fraction = window_fraction;
  est.window_start = static_cast<std::int64_t>(
      window_fraction * static_cast<double>(run.steps));
  for (const auto& [site, last] : run.final_last_visit)
    if (last > est.window_start) est.sites.push_back(site);
  est.size = static_cast<std::int64_t>(est.sites.size());
  return est;
}

DensityProfile density_profile(const CheckpointTrail& trail) {
  DensityProfile profile;
  profile.schedule = trail.schedule;
  profile.per_checkpoint.reserve(trail.snapshots.size());
  for (const auto& snap : trail.snapshots) {
    std::vector<DensityPoint> points;
    points.reserve(snap.occupation.size());
    const double n = static_cast<double>(snap.n);
    const double log_n = snap.n > 1 ? std::log(n) : 0.0;
    for (const auto& [site, z] : snap.occupation) {
      DensityPoint p;
      p.site = site;
      p.density = static_cast<double>(z) / n;
      p.log_exponent =
          log_n > 0.0 ? std::log(static_cast<double>(z)) / log_n : 0.0;
      points.push_back(p);
    }
    profile.per_checkpoint.push_back(std::move(points));
  }
  return profile;
}

PowerLawFit power_law_fit(
    const std::vector<std::pair<std::int64_t, double>>& series) {
  if (series.size() < 4)
    throw std::invalid_argument("power-law fit needs >= 4 checkpoints");
  const double span = static_cast<double>(series.back().first) /
                      static_cast<double>(series.front().first);
  if (span < 100.0)
    throw std::invalid_argument("power-law fit needs >= 2 decades of checkpoints");
  for (const auto& [n, z] : series)
    if (n < 1 || !(z > 0.0))
      throw std::invalid_argument("power-law fit needs n >= 1 and Z > 0");

  // Limit statements live in the tail; the early transient only biases the
  // slope, so fit the trailing half.
  const std::size_t begin = series.size() / 2;
  const std::size_t count = series.size() - begin;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = begin; i < series.size(); ++i) {
    mx += std::log(static_cast<double>(series[i].first));
    my += std::log(series[i].second);
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < series.size(); ++i) {
    const double dx = std::log(static_cast<double>(series[i].first)) - mx;
    const double dy = std::log(series[i].second) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  PowerLawFit fit;
  fit.points_used = count;
  fit.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  double rss = 0.0;
  for (std::size_t i = begin; i < series.size(); ++i) {
    const double dx = std::log(static_cast<double>(series[i].first)) - mx;
    const double dy = std::log(series[i].second) - my;
    const double r = dy - fit.exponent * dx;
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(count));
  return fit;
}

ReturnTimeProcess extract_return_process(const MonitorReport& report,
                                         Vertex anchor) {
  for (const auto& series : report.returns) {
    if (series.spec.anchor != anchor) continue;
    if (series.visits < 2)
      throw std::runtime_error("anchor was not visited twice");
    ReturnTimeProcess out;
    out.spec = series.spec;
    out.visits = series.visits;
    out.samples = series.samples;
    out.at_checkpoints = series.at_checkpoints;
    return out;
  }
  throw std::runtime_error(
      "no return monitor was attached for this anchor; sparse checkpoints "
      "cannot reconstruct return times");
}

}  // namespace reinforce
