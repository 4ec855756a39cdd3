#include <doctest.h>

#include <cmath>

#include "reinforce/estimators.hpp"

using namespace reinforce;

namespace {

CheckpointTrail trail_from(const std::vector<CheckpointSnapshot>& snaps) {
  CheckpointTrail t;
  for (const auto& s : snaps) t.schedule.push_back(s.n);
  t.snapshots = snaps;
  return t;
}

}  // namespace

TEST_CASE("range estimate reads the visited interval off the trail") {
  // Path 0,1,0,-1: R = {-1,0,1}.
  CheckpointSnapshot snap;
  snap.n = 3;
  snap.position = -1;
  snap.occupation = {{-1, 2}, {0, 3}, {1, 2}};
  const auto est = estimate_range(trail_from({snap}));
  CHECK(est.min_visited == -1);
  CHECK(est.max_visited == 1);
  CHECK(est.size == 3);
  REQUIRE(est.size_at.size() == 1);
  CHECK(est.size_at[0] == std::pair<std::int64_t, std::int64_t>{3, 3});

  CheckpointTrail empty;
  CHECK_THROWS_AS(estimate_range(empty), std::invalid_argument);
}

TEST_CASE("essential range windows on the last visit times") {
  WalkRun run;
  run.steps = 100;
  run.final_last_visit = {{-3, 20}, {-1, 80}, {0, 99}, {1, 100}, {2, 45}};

  const auto half = estimate_essential_range(run, 0.5);
  CHECK(half.window_start == 50);
  CHECK(half.sites == std::vector<Vertex>{-1, 0, 1});
  CHECK(half.size == 3);

  // A site that stopped being visited before half-time is excluded.
  bool has_m3 = false;
  for (Vertex v : half.sites) has_m3 = has_m3 || v == -3;
  CHECK_FALSE(has_m3);

  CHECK_THROWS_AS(estimate_essential_range(run, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_essential_range(run, 1.0), std::invalid_argument);
}

TEST_CASE("essential range is nonincreasing in the window fraction") {
  WalkRun run;
  run.steps = 1000;
  run.final_last_visit = {{-2, 100}, {-1, 350}, {0, 997}, {1, 1000}, {2, 620}};
  std::int64_t prev = 6;
  for (double wf : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto est = estimate_essential_range(run, wf);
    CHECK(est.size <= prev);
    prev = est.size;
  }
}

TEST_CASE("density profile restates conservation per checkpoint") {
  CheckpointSnapshot snap;
  snap.n = 2;
  snap.position = 1;
  snap.occupation = {{0, 2}, {1, 2}};
  const auto profile = density_profile(trail_from({snap}));
  REQUIRE(profile.per_checkpoint.size() == 1);
  const auto& pts = profile.per_checkpoint[0];
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].density == doctest::Approx(1.0));
  CHECK(pts[1].density == doctest::Approx(1.0));
  // Sum of densities equals (n + 2)/n.
  CHECK(pts[0].density + pts[1].density ==
        doctest::Approx((2.0 + 2.0) / 2.0));
}

TEST_CASE("power-law fit recovers exact exponents on synthetic input") {
  std::vector<std::pair<std::int64_t, double>> series;
  for (std::int64_t n : {100, 1000, 10000, 100000, 1000000})
    series.emplace_back(n, std::pow(static_cast<double>(n), 0.3));
  const auto fit = power_law_fit(series);
  CHECK(std::abs(fit.exponent - 0.3) <= 1e-6);
  CHECK(fit.residual <= 1e-9);

  std::vector<std::pair<std::int64_t, double>> flat;
  for (std::int64_t n : {100, 1000, 10000, 100000}) flat.emplace_back(n, 7.0);
  CHECK(power_law_fit(flat).exponent == doctest::Approx(0.0));
}

TEST_CASE("power-law fit enforces its sampling preconditions") {
  std::vector<std::pair<std::int64_t, double>> three = {
      {100, 1.0}, {1000, 2.0}, {10000, 3.0}};
  CHECK_THROWS_AS(power_law_fit(three), std::invalid_argument);
  std::vector<std::pair<std::int64_t, double>> narrow = {
      {100, 1.0}, {200, 2.0}, {400, 3.0}, {800, 4.0}};
  CHECK_THROWS_AS(power_law_fit(narrow), std::invalid_argument);
}

TEST_CASE("return process extraction needs a live monitor and two visits") {
  MonitorReport no_monitor;
  CHECK_THROWS_AS(extract_return_process(no_monitor, 0), std::runtime_error);

  MonitorReport once;
  ReturnSeries series;
  series.spec = {0, -1, 1, -1, false};
  series.visits = 1;
  once.returns.push_back(series);
  CHECK_THROWS_AS(extract_return_process(once, 0), std::runtime_error);

  MonitorReport ok = once;
  ok.returns[0].visits = 3;
  ok.returns[0].samples = {{0, 0, 1, 1}, {1, 2, 1, 2}, {2, 4, 2, 2}};
  const auto proc = extract_return_process(ok, 0);
  CHECK(proc.visits == 3);
  CHECK(proc.samples[1].ratio() == doctest::Approx(2.0 / 3.0));
}
