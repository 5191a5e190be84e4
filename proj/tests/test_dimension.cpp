#include "doctest.h"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "smoothset/dimension.hpp"
#include "smoothset/smoothgen.hpp"

using namespace smoothset;

namespace {

std::uint64_t band_count_oracle(const MassGrid& g, int j, double lo, double hi) {
  const std::int64_t side = std::int64_t{1} << j;
  std::uint64_t c = 0;
  for (std::int64_t y = 0; y < (g.dim() == 2 ? side : 1); ++y)
    for (std::int64_t x = 0; x < side; ++x) {
      const double d = oracle::dyadic_density(g, j, x, y);
      c += d >= lo && d <= hi;
    }
  return c;
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int j = a; j <= b; ++j) v.push_back(j);
  return v;
}

}  // namespace

TEST_CASE("least-squares fit") {
  std::vector<int> s = range(0, 8);
  std::vector<std::uint64_t> c;
  for (int j : s) c.push_back(std::uint64_t{3} << (2 * j));
  auto f = fit_counts(s, c);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
  CHECK(f.rsq == doctest::Approx(1.0));
  CHECK(f.flag.empty());
  CHECK_THROWS_AS(fit_counts({}, {}), Error);
  CHECK(default_window(10) == range(2, 8));
}

TEST_CASE("empty and degenerate targets") {
  auto full = fixture("full", 2, 6);
  auto f = box_count(full, 0.25, 0.75);
  for (auto c : f.counts) CHECK(c == 0);
  CHECK(f.slope == 0.0);
  CHECK(f.flag == "empty target");

  auto cb = fixture("checkerboard", 1, 8, 1);
  auto d = box_count(cb, 0.25, 0.75, range(0, 8));
  for (int j = 0; j <= 8; ++j) CHECK(d.counts[j] == band_count_oracle(cb, j, 0.25, 0.75));
  CHECK(d.counts[0] == 1);
  CHECK(d.flag == "degenerate");
  CHECK_THROWS_AS(box_count(cb, 0.6, 0.4), Error);
  CHECK_THROWS_AS(box_count(fixture("full", 1, 3), 0.2, 0.8), Error);
}

TEST_CASE("full support has slope n") {
  for (int n : {1, 2}) {
    auto g = fixture("full", n, 8);
    auto f = box_count(g, 0.5, 1.0, range(0, 8));
    for (int j = 0; j <= 8; ++j) CHECK(f.counts[j] == (std::uint64_t{1} << (n * j)));
    CHECK(f.slope == doctest::Approx(n).epsilon(1e-14));
  }
}

TEST_CASE("martingale band counts") {
  auto g = generate_martingale_set(make_schedule("harmonic", 16, 7), 1);
  auto f = box_count(g, 0.25, 0.75, range(4, 12));
  CHECK(f.slope >= 0.9);
  CHECK(f.slope <= 1.01);
  for (int j : {4, 8, 12}) CHECK(f.counts[j - 4] == band_count_oracle(g, j, 0.25, 0.75));
  auto again = box_count(g, 0.25, 0.75, range(4, 12), 3);
  CHECK(again.slope == f.slope);
  CHECK(again.counts == f.counts);
  CHECK(boxcount_csv(f).rfind("j,count,logCount\n4,", 0) == 0);
}

TEST_CASE("mask counts are monotone") {
  auto g = generate_martingale_set(make_schedule("harmonic", 12, 9), 2);
  auto e = estimate_eset(g, 0.5, 0.15, 3);
  auto m = mask_count(2, 12, e.members, range(0, 12));
  auto viaE = eset_box_dim(e, range(0, 12));
  CHECK(m.counts == viaE.counts);
  for (std::size_t j = 1; j < m.counts.size(); ++j) {
    CHECK(m.counts[j] >= m.counts[j - 1]);
    CHECK(m.counts[j] <= 4 * m.counts[j - 1]);
  }
  CHECK(m.slope >= 0.0);
  CHECK(m.slope <= 2.01);
}

TEST_CASE("scaffold box dimension") {
  auto flat = build_generations(fixture("constant", 1, 10, 0.5), ScheduleParams{});
  auto d = scaffold_box_dim(flat);
  CHECK(d.fit.flag == "degenerate");
  CHECK_FALSE(d.comparable);

  auto g = generate_martingale_set(make_schedule("harmonic", 16, 7), 1);
  auto prof = dyadic_profile(g);
  for (auto& s : prof.samplesByScale) {
    s.omega *= 0.1;
    s.envelope *= 0.1;
  }
  auto s = build_generations(g, ScheduleParams{}, prof);
  REQUIRE(s.generations.size() >= 2);
  auto sd = scaffold_box_dim(s);
  // union of the last generation, counted cell by cell
  std::set<std::size_t> cells;
  for (const auto& m : s.generations.back()) {
    const std::int64_t w = std::int64_t{1} << (16 - m.cube.level);
    for (std::int64_t i = 0; i < w; ++i) cells.insert(static_cast<std::size_t>(m.cube.index[0] * w + i));
  }
  auto oracle = mask_count(1, 16, std::vector<std::size_t>(cells.begin(), cells.end()), sd.fit.scales);
  CHECK(oracle.counts == sd.fit.counts);
  CHECK(sd.P == doctest::Approx(s.perGenP[0]));
}
