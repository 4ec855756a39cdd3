#include <doctest.h>

#include <cmath>
#include <map>

#include "reinforce/oracle.hpp"
#include "reinforce/rng.hpp"
#include "reinforce/walk.hpp"

using namespace reinforce;

TEST_CASE("horizon-1 table is the symmetric two-point law") {
  const auto table = enumerate_exact(GraphSpec::integer_line(), 0, 1);
  REQUIRE(table.paths.size() == 2);
  CHECK(table.paths.at({0, -1}) == doctest::Approx(0.5));
  CHECK(table.paths.at({0, 1}) == doctest::Approx(0.5));
}

TEST_CASE("return probability at step 2 is 2/3") {
  const auto table = enumerate_exact(GraphSpec::integer_line(), 0, 2);
  double back = 0.0;
  for (const auto& [path, p] : table.paths)
    if (path.back() == 0) back += p;
  CHECK(back == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("total mass is 1 within 1e-12 at every supported horizon") {
  for (std::int64_t h = 1; h <= 10; ++h) {
    CHECK(std::abs(enumerate_exact(GraphSpec::integer_line(), 0, h).total_mass() -
                   1.0) <= 1e-12);
  }
  for (std::int64_t h = 1; h <= 8; ++h) {
    CHECK(std::abs(enumerate_exact(GraphSpec::interval(-2, 2), 0, h)
                       .total_mass() -
                   1.0) <= 1e-12);
  }
  // Finite graph with a loop.
  const auto loop = GraphSpec::finite({{0, 1}, {0}});
  CHECK(std::abs(enumerate_exact(loop, 0, 8).total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("horizon cap is enforced with the bound in the message") {
  CHECK_THROWS_AS(enumerate_exact(GraphSpec::integer_line(), 0, 13),
                  std::invalid_argument);
  CHECK_THROWS_AS(enumerate_exact_coupled(-2, 2, 0, 9), std::invalid_argument);
}

TEST_CASE("Monte Carlo path frequencies converge to the oracle") {
  const std::int64_t horizon = 8;
  const auto graph = GraphSpec::integer_line();
  const auto table = enumerate_exact(graph, 0, horizon);

  std::map<std::vector<std::pair<Vertex, std::int64_t>>, std::int64_t> counts;
  const std::int64_t samples = 100000;
  SplitStream root(4242);
  for (std::int64_t i = 0; i < samples; ++i) {
    SplitStream rng = root.split(i);
    auto state = WalkState::fresh(graph, 0);
    for (std::int64_t k = 0; k < horizon; ++k) step_inplace(state, graph, rng);
    counts[state.occ.visited_counts()] += 1;
  }
  CHECK(occupation_tv(table.occupations, counts, samples) <= 0.03);
}

TEST_CASE("coupled joint law at horizon 2 matches the hand enumeration") {
  // J = [-1,1] from 0: four full paths, reflection folds the escapes onto
  // the returning interval path.
  const auto table = enumerate_exact_coupled(-1, 1, 0, 2);
  REQUIRE(table.joint.size() == 4);
  using Path = std::vector<Vertex>;
  const auto p = [&](const Path& full, const Path& intv) {
    return table.joint.at({full, intv});
  };
  CHECK(p({0, 1, 0}, {0, 1, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p({0, 1, 2}, {0, 1, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(p({0, -1, 0}, {0, -1, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p({0, -1, -2}, {0, -1, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(table.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("coupled marginals equal the plain oracles") {
  for (std::int64_t h = 1; h <= 5; ++h) {
    const auto joint = enumerate_exact_coupled(-2, 2, 0, h);
    CHECK(std::abs(joint.total_mass() - 1.0) <= 1e-12);

    const auto full = joint.full_marginal();
    const auto line = enumerate_exact(GraphSpec::integer_line(), 0, h);
    REQUIRE(full.paths.size() == line.paths.size());
    for (const auto& [path, p] : line.paths)
      CHECK(full.paths.at(path) == doctest::Approx(p).epsilon(1e-12));

    const auto intv = joint.interval_marginal();
    const auto pj = enumerate_exact(GraphSpec::interval(-2, 2), 0, h);
    REQUIRE(intv.paths.size() == pj.paths.size());
    for (const auto& [path, p] : pj.paths)
      CHECK(intv.paths.at(path) == doctest::Approx(p).epsilon(1e-12));
  }
}
