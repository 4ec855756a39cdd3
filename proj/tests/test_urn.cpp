#include <doctest.h>

#include <cmath>
#include <vector>

#include "reinforce/stats.hpp"
#include "reinforce/urn.hpp"

using namespace reinforce;

TEST_CASE("single draws apply the matching replacement row") {
  int red_seen = 0, blue_seen = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const double u = SplitStream(seed).next_double();

    // Unit reinforcement of the drawn color.
    SplitStream r1(seed);
    const auto polya = urn_step({1.0, 1.0, 0}, {1, 0, 0, 1}, r1);
    if (u < 0.5) {
      CHECK(polya.x == 2.0);
      CHECK(polya.y == 1.0);
      ++red_seen;
    } else {
      CHECK(polya.x == 1.0);
      CHECK(polya.y == 2.0);
      ++blue_seen;
    }

    // Cross-reinforcing rule: a blue draw from (1,1) gives (2,3).
    SplitStream r2(seed);
    const auto friedman = urn_step({1.0, 1.0, 0}, {2, 1, 1, 2}, r2);
    if (u < 0.5) {
      CHECK(friedman.x == 3.0);
      CHECK(friedman.y == 2.0);
    } else {
      CHECK(friedman.x == 2.0);
      CHECK(friedman.y == 3.0);
    }
  }
  CHECK(red_seen > 0);
  CHECK(blue_seen > 0);
}

TEST_CASE("total mass moves by a row sum every step") {
  const ReplacementRule rule{0.5, 1.5, 2.0, 0.25};
  SplitStream rng(11);
  UrnState s{1.0, 1.0, 0};
  for (int i = 0; i < 5000; ++i) {
    const auto before = s.x + s.y;
    s = urn_step(s, rule, rng);
    const double inc = s.x + s.y - before;
    const bool red = std::abs(inc - (rule.a + rule.b)) < 1e-12;
    const bool blue = std::abs(inc - (rule.c + rule.d)) < 1e-12;
    CHECK((red || blue));
  }
}

TEST_CASE("unit-reinforcement fraction obeys the strict increment bound") {
  // Integer masses keep the bound exactly checkable.
  SplitStream rng(21);
  UrnState s{1.0, 1.0, 0};
  for (int i = 0; i < 100000; ++i) {
    const double z = s.fraction();
    const double bound = 1.0 / (s.x + s.y);
    s = urn_step(s, {1, 0, 0, 1}, rng);
    CHECK(std::abs(s.fraction() - z) < bound);
  }
}

TEST_CASE("unit-reinforcement fraction is a martingale in one step") {
  const UrnState base{3.0, 2.0, 0};
  SplitStream rng(31);
  double sum = 0.0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    SplitStream r = rng.split(i);
    sum += urn_step(base, {1, 0, 0, 1}, r).fraction();
  }
  const double emp = sum / trials;
  // One-step outcomes are 4/6 (red, p=3/5) or 3/6 (blue).
  const double p = base.fraction();
  const double sd = (4.0 / 6.0 - 3.0 / 6.0) * std::sqrt(p * (1.0 - p));
  const double se = sd / std::sqrt(static_cast<double>(trials));
  CHECK(std::abs(emp - p) <= 4.0 * se);
}

TEST_CASE("degenerate urn is rejected") {
  SplitStream rng(1);
  CHECK_THROWS_WITH_AS(urn_step({0.0, 0.0, 0}, {1, 0, 0, 1}, rng),
                       "degenerate urn", std::runtime_error);
}

TEST_CASE("increment spec validates declared moments") {
  // Geometric with success p has mean 1/p.
  CHECK_NOTHROW(RandomIncrementSpec::geometric(0.5, 2.0, 2.0, 6.0));
  CHECK_THROWS_AS(RandomIncrementSpec::geometric(0.5, 3.0, 3.0, 6.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(RandomIncrementSpec::geometric(0.5, 2.0, 2.0, 5.0),
                  std::invalid_argument);
  CHECK_NOTHROW(RandomIncrementSpec::deterministic(2.0, 2.0, 2.0, 4.0));
  CHECK_THROWS_AS(RandomIncrementSpec::deterministic(-1.0, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  const std::vector<std::pair<double, double>> table = {{1.0, 0.25}, {3.0, 0.75}};
  CHECK_NOTHROW(RandomIncrementSpec::empirical(table, 2.5, 2.5, 7.0));
  CHECK_THROWS_AS(RandomIncrementSpec::empirical(table, 2.0, 2.0, 7.0),
                  std::invalid_argument);
}

TEST_CASE("geometric increments follow the inversion law") {
  const auto spec = RandomIncrementSpec::geometric(0.25, 4.0, 4.0, 28.0);
  SplitStream rng(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double w = spec.sample(rng);
    REQUIRE(w >= 1.0);
    CHECK(w == std::floor(w));
    sum += w;
  }
  CHECK(std::abs(sum / n - 4.0) < 0.05);
}

TEST_CASE("blue branch of the random-increment urn adds one blue ball") {
  const auto spec = RandomIncrementSpec::deterministic(2.0, 2.0, 2.0, 4.0);
  int blue_seen = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const double u = SplitStream(seed).next_double();
    if (u < 5.0 / 7.0) continue;  // red branch from (5,2)
    SplitStream rng(seed);
    const auto traj = run_random_increment_urn({5.0, 2.0, 0}, spec, 1, {1}, rng);
    CHECK(traj.final_point.x == 5.0);
    CHECK(traj.final_point.y == 3.0);
    ++blue_seen;
  }
  CHECK(blue_seen > 0);
}

TEST_CASE("deterministic increments reproduce the power-law urn bit for bit") {
  const auto spec = RandomIncrementSpec::deterministic(2.0, 2.0, 2.0, 4.0);
  SplitStream r1(17), r2(17);
  const auto a = run_random_increment_urn({1.0, 1.0, 0}, spec, 20000, {}, r1);
  const auto b = run_urn({1.0, 1.0, 0}, {2, 0, 0, 1}, 20000, {}, r2);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
  }
}

TEST_CASE("growth statistics evaluate the arithmetic exactly") {
  UrnTrajectory t;
  t.schedule = {10};
  t.points = {{10, 9.0, 3.0}};
  t.final_point = t.points[0];
  const auto power = power_ratio_statistic(t, 2.0);
  REQUIRE(power.size() == 1);
  CHECK(power[0].x_over_y_pow == doctest::Approx(1.0));
  CHECK(power[0].log_ratio == doctest::Approx(2.0));

  UrnTrajectory t2;
  t2.schedule = {10};
  t2.points = {{10, std::exp(1.0), 1.0}};
  t2.final_point = t2.points[0];
  const auto logc = log_correction_statistic(t2, 1.0);
  REQUIRE(logc.size() == 1);
  CHECK(logc[0].statistic == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("both colors escape to infinity when both columns can grow") {
  // (a+c)(b+d) > 0; the minimum mass must keep growing.
  const ReplacementRule rule{2, 1, 1, 2};
  int growing = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    SplitStream rng = SplitStream(1234).split(r);
    const auto traj = run_urn({1, 1, 0}, rule, 1000000, {1000, 1000000}, rng);
    const double min_early = std::min(traj.points[0].x, traj.points[0].y);
    const double min_late = std::min(traj.points[1].x, traj.points[1].y);
    if (min_late > min_early) ++growing;
  }
  CHECK(growing == reps);
}

TEST_CASE("positive-eigenvector rules drive the fraction to v1/(v1+v2)") {
  // Left Perron eigenvector of the replacement matrix, computed here rather
  // than hardcoded.
  const double a = 3, b = 1, c = 2, d = 2;
  const double lambda = 0.5 * ((a + d) + std::sqrt((a - d) * (a - d) + 4 * b * c));
  const double v1 = c, v2 = lambda - a;
  const double target = v1 / (v1 + v2);

  std::vector<double> finals;
  for (int r = 0; r < 200; ++r) {
    SplitStream rng = SplitStream(555).split(r);
    finals.push_back(
        run_urn({1, 1, 0}, {a, b, c, d}, 10000, {10000}, rng).final_point.fraction());
  }
  CHECK(std::abs(mean(finals) - target) <= 0.02);
}

TEST_CASE("increment diagnostic is zero on constant sequences and guards input") {
  std::vector<std::vector<double>> flat(120, std::vector<double>(5, 3.25));
  const std::vector<std::int64_t> sched = {1, 10, 100, 1000, 10000};
  const auto bins = increment_diagnostic(flat, sched);
  REQUIRE(bins.size() == 4);
  for (const auto& b : bins) {
    CHECK(b.mean_increment_per_step == 0.0);
    CHECK(b.mean_square_increment_per_step == 0.0);
    CHECK(b.cumulative_quadratic == 0.0);
  }
  std::vector<std::vector<double>> small(50, std::vector<double>(5, 1.0));
  CHECK_THROWS_AS(increment_diagnostic(small, sched), std::invalid_argument);
}
