#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "smoothset/grid_io.hpp"
#include "smoothset/modulus.hpp"
#include "smoothset/smoothgen.hpp"

using namespace smoothset;

namespace {

// Largest |D(child) - D(parent)| for children at level k, from raw cells.
double max_increment(const MassGrid& g, int k) {
  const int n = g.dim();
  const std::int64_t m = std::int64_t{1} << k;
  double worst = 0.0;
  for (std::int64_t y = 0; y < (n == 2 ? m : 1); ++y)
    for (std::int64_t x = 0; x < m; ++x) {
      const double c = oracle::dyadic_density(g, k, x, y);
      const double p = oracle::dyadic_density(g, k - 1, x / 2, y / 2);
      worst = std::max(worst, std::abs(c - p));
    }
  return worst;
}

}  // namespace

TEST_CASE("zero schedule gives a constant set") {
  auto s = make_schedule("zero", 10, 7, 0.3);
  auto g = generate_martingale_set(s, 1);
  for (double m : g.cells()) CHECK(std::abs(m - 0.3) <= kQuantum);
  auto p = dyadic_profile(g);
  for (const auto& x : p.samplesByScale) CHECK(x.omega == 0.0);
}

TEST_CASE("increments respect the schedule") {
  for (const char* preset : {"sqrt", "harmonic"})
    for (int n = 1; n <= 2; ++n) {
      const int K = n == 1 ? 12 : 8;
      auto s = make_schedule(preset, K, 7);
      auto g = generate_martingale_set(s, n);
      for (int k = 1; k <= K; ++k) CHECK(max_increment(g, k) <= s.eps[k - 1] + 1e-15);
    }
}

TEST_CASE("start density is preserved exactly") {
  for (int n = 1; n <= 2; ++n) {
    auto g = generate_martingale_set(make_schedule("sqrt", n == 1 ? 12 : 8, 7), n);
    CHECK(g.total_mass() == 0.5);
  }
}

TEST_CASE("martingale identity, range and determinism") {
  for (std::uint64_t seed : {1ULL, 7ULL, 12345ULL}) {
    for (int n = 1; n <= 2; ++n) {
      const int K = n == 1 ? 11 : 7;
      auto s = make_schedule("sqrt", K, seed, 0.37);
      auto g = generate_martingale_set(s, n);
      for (double m : g.cells()) {
        CHECK(m >= 0.0);
        CHECK(m <= 1.0);
      }
      for (int k = 0; k < K; ++k) {
        const std::int64_t m = std::int64_t{1} << k;
        for (std::int64_t y = 0; y < (n == 2 ? m : 1); ++y)
          for (std::int64_t x = 0; x < m; ++x) {
            double mean = 0.0;
            for (int c = 0; c < (1 << n); ++c)
              mean += oracle::dyadic_density(g, k + 1, 2 * x + (c & 1), n == 2 ? 2 * y + (c >> 1) : 0);
            mean /= (1 << n);
            CHECK(std::abs(mean - oracle::dyadic_density(g, k, x, y)) <= 1e-12);
          }
      }
      auto again = generate_martingale_set(s, n);
      CHECK(encode_grid(again) == encode_grid(g));
    }
  }
  auto a = generate_martingale_set(make_schedule("harmonic", 10, 1), 1);
  auto b = generate_martingale_set(make_schedule("harmonic", 10, 2), 1);
  CHECK_FALSE(a == b);
}

TEST_CASE("resolution limits") {
  CHECK_THROWS_AS(generate_martingale_set(make_schedule("harmonic", 21, 1), 1), Error);
  CHECK_THROWS_AS(generate_martingale_set(make_schedule("harmonic", 14, 1), 2), Error);
  CHECK_THROWS_AS(make_schedule("harmonic", 4, 1, 0.0), Error);
  CHECK_THROWS_AS(make_schedule("nope", 4, 1), Error);
}

TEST_CASE("fixtures") {
  auto h = fixture("halfspace", 1, 2, 0.5);
  CHECK(std::vector<double>(h.cells().begin(), h.cells().end()) == std::vector<double>{1, 1, 0, 0});
  auto h3 = fixture("halfspace", 1, 2, 0.3);
  CHECK(std::abs(h3.cell(1) - 0.2) <= kQuantum);

  auto c1 = fixture("checkerboard", 1, 3, 1);
  CHECK(std::vector<double>(c1.cells().begin(), c1.cells().end()) == std::vector<double>{1, 1, 1, 1, 0, 0, 0, 0});
  auto c3 = fixture("checkerboard", 1, 3, 3);
  CHECK(std::vector<double>(c3.cells().begin(), c3.cells().end()) == std::vector<double>{1, 0, 1, 0, 1, 0, 1, 0});
  auto c2d = fixture("checkerboard", 2, 2, 1);
  CHECK(c2d.cell(0, 0) == 1.0);
  CHECK(c2d.cell(2, 0) == 0.0);
  CHECK(c2d.cell(2, 2) == 1.0);

  auto k = fixture("constant", 2, 5, 0.37);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 0.7);
  for (int t = 0; t < 100; ++t) {
    AxisBox b{2, Point(u(rng), u(rng)), 0.01 + u(rng) * 0.4};
    CHECK(std::abs(k.cube_density(b) - 0.37) <= kQuantum);
  }

  CHECK_THROWS_AS(fixture("halfspace", 1, 3, 1.5), Error);
  CHECK_THROWS_AS(fixture("checkerboard", 1, 3, 4), Error);
  CHECK_THROWS_AS(fixture("constant", 1, 3, -0.1), Error);
  CHECK_THROWS_AS(fixture("triangle", 1, 3), Error);
}

TEST_CASE("undecided mass counts the neutral band") {
  CHECK(undecided_mass(fixture("constant", 1, 4, 0.5)) == 1.0);
  CHECK(undecided_mass(fixture("full", 1, 4)) == 0.0);
  CHECK(undecided_mass(fixture("halfspace", 1, 2, 0.375)) == 0.25);
}

TEST_CASE("default schedule yields a decaying modulus") {
  auto g = generate_martingale_set(make_schedule("harmonic", 12, 7), 1);
  auto p = estimate_modulus(g, {2, 8});
  CHECK(p.omega_at(8) < p.omega_at(2));
}
