#include <doctest.h>

#include <cmath>
#include <vector>

#include "reinforce/rng.hpp"

using namespace reinforce;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors from the Random123 test suite.
  auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and restorable from their key") {
  SplitStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  SplitStream c(7);
  const auto key = c.key();
  std::vector<double> first;
  for (int i = 0; i < 16; ++i) first.push_back(c.next_double());
  SplitStream d = SplitStream::from_key(key);
  for (int i = 0; i < 16; ++i) CHECK(d.next_double() == first[i]);
}

TEST_CASE("split children differ from each other and the parent") {
  SplitStream root(1);
  SplitStream c0 = root.split(0);
  SplitStream c1 = root.split(1);
  CHECK(c0.key() != c1.key());
  CHECK(c0.key() != root.key());
  CHECK(c0.next_u64() != c1.next_u64());
}

TEST_CASE("uniform draws live in [0,1) with sane mean") {
  SplitStream s(123);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

namespace {

double pair_correlation(std::uint64_t base, int i, int j, int draws) {
  SplitStream a = SplitStream::from_key(derive_replicate_seed(base, i));
  SplitStream b = SplitStream::from_key(derive_replicate_seed(base, j));
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double x = a.next_double();
    const double y = b.next_double();
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double n = draws;
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

}  // namespace

TEST_CASE("replicate streams show no observable pairwise correlation") {
  // The estimator itself carries noise ~ 1/sqrt(draws); at 1e4 draws that is
  // 0.01, so the short-window check uses a 4.5-sigma noise bound and the
  // 0.01 requirement is asserted where it is resolvable, at 1e6 draws.
  const int streams = 10;
  double max_abs = 0.0, sum_abs = 0.0;
  int pairs = 0;
  for (int i = 0; i < streams; ++i) {
    for (int j = i + 1; j < streams; ++j) {
      const double c = std::abs(pair_correlation(99, i, j, 10000));
      max_abs = std::max(max_abs, c);
      sum_abs += c;
      ++pairs;
    }
  }
  CHECK(max_abs < 0.045);
  CHECK(sum_abs / pairs < 0.012);  // mean of |noise| ~ 0.008

  for (const auto [i, j] : {std::pair{0, 1}, {2, 7}, {4, 9}})
    CHECK(std::abs(pair_correlation(99, i, j, 1000000)) < 0.01);
}
