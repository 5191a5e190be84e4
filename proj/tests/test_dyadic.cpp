#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "smoothset/dyadic.hpp"
#include "smoothset/grid_io.hpp"
#include "smoothset/smoothgen.hpp"

using namespace smoothset;

TEST_CASE("children split a cube into its dyadic halves") {
  auto c = children(DyadicCube{1, 0, Index2(0, 0)});
  REQUIRE(c.size() == 2);
  CHECK(c[0].corner()[0] == 0.0);
  CHECK(c[0].side() == 0.5);
  CHECK(c[1].corner()[0] == 0.5);

  auto q = children(DyadicCube{2, 0, Index2(0, 0)});
  REQUIRE(q.size() == 4);
  double area = 0.0;
  for (const auto& ch : q) {
    CHECK(ch.level == 1);
    area += ch.volume();
  }
  CHECK(area == 1.0);

  // [1/2, 3/4) at level 2
  auto h = children(DyadicCube{1, 2, Index2(2, 0)});
  CHECK(h[0].corner()[0] == 0.5);
  CHECK(h[1].corner()[0] == 0.625);
  CHECK(h[1].corner()[0] + h[1].side() == 0.75);
}

TEST_CASE("containing cube is unique and nests") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Point x(u(rng), u(rng));
    for (int k = 1; k < 12; ++k) {
      auto q = containing_cube(x, k, 2);
      auto p = containing_cube(x, k - 1, 2);
      CHECK(p == q.parent());
      CHECK(p.contains(q));
      for (int i = 0; i < 2; ++i) {
        CHECK(q.corner()[i] <= x[i]);
        CHECK(x[i] < q.corner()[i] + q.side());
      }
    }
  }
}

TEST_CASE("box mass on fixtures") {
  auto full = fixture("full", 1, 5);
  CHECK(full.box_mass(AxisBox{1, Point(0, 0), 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  auto full2 = fixture("full", 2, 4);
  CHECK(full2.box_mass(AxisBox{2, Point(0, 0), 1.0}) == doctest::Approx(1.0).epsilon(1e-15));

  auto half = fixture("halfspace", 1, 3, 0.5);
  CHECK(half.box_mass(AxisBox{1, Point(0.25, 0), 0.5}) == doctest::Approx(0.25).epsilon(1e-15));

  AxisBox b{1, Point(0.1, 0), 0.2};
  CHECK(full.box_mass(b) == doctest::Approx(oracle::box_mass(full, Point(0.1, 0), Point(0.3, 0))).epsilon(1e-12));
  CHECK(full.box_mass(b) == doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_AS(full.box_mass(AxisBox{1, Point(0.1, 0), 0.0}), Error);
  try {
    full.box_mass(AxisBox{1, Point(0.1, 0), -1.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyBox);
  }
}

TEST_CASE("cube density on fixtures") {
  auto empty = fixture("empty", 2, 4);
  CHECK(empty.cube_density(AxisBox{2, Point(0.3, 0.2), 0.4}) == 0.0);

  auto cb = fixture("checkerboard", 1, 3, 1);
  CHECK(cb.cube_density(AxisBox{1, Point(0, 0), 1.0}) == 0.5);
  CHECK(cb.cube_density(AxisBox{1, Point(0, 0), 0.25}) == 1.0);
  CHECK(cb.cube_density(DyadicCube{1, 1, Index2(1, 0)}) == 0.0);
}

TEST_CASE("clipped boxes use the clipped volume") {
  auto half = fixture("halfspace", 2, 4, 0.5);
  // [-0.25, 0.25) x [0, 0.5) clips to a quarter of width 0.25, all inside A
  CHECK(half.cube_density(AxisBox{2, Point(-0.25, 0.0), 0.5}) == 1.0);
  CHECK_THROWS_AS(half.cube_density(AxisBox{2, Point(1.5, 0.0), 0.25}), Error);
}

TEST_CASE("consecutive pairs match exhaustive listing") {
  auto brute = [](int n, int j, int S) {
    const double unit = std::ldexp(1.0, -S), side = std::ldexp(1.0, -j);
    const std::int64_t steps = std::int64_t{1} << S;
    std::uint64_t count = 0;
    for (int axis = 0; axis < n; ++axis)
      for (std::int64_t a = 0; a <= steps; ++a)
        for (std::int64_t b = 0; b <= (n == 2 ? steps : 0); ++b) {
          double c[2] = {a * unit, b * unit};
          double hi[2] = {c[0] + side, c[1] + side};
          hi[axis] += side;
          bool ok = true;
          for (int i = 0; i < n; ++i) ok = ok && hi[i] <= 1.0;
          count += ok;
        }
    return count;
  };
  for (int n = 1; n <= 2; ++n)
    for (int S = 0; S <= 6; ++S)
      for (int j = 0; j <= S; ++j) {
        std::uint64_t seen = 0;
        for_each_consecutive_pair(n, j, S, [&](const ConsecutivePair& p) {
          ++seen;
          CHECK(p.first.side == p.second.side);
          CHECK(p.second.corner[p.sharedFaceAxis] == p.first.corner[p.sharedFaceAxis] + p.first.side);
          CHECK(p.first.inside_unit());
          CHECK(p.second.inside_unit());
        });
        CHECK(seen == brute(n, j, S));
        CHECK(seen == consecutive_pair_count(n, j, S));
      }
  CHECK(consecutive_pair_count(1, 1, 1) == 1);
  CHECK(consecutive_pair_count(2, 1, 1) == 4);
  // the second lattice corner 1/4 would push the pair past 1
  CHECK(consecutive_pair_count(1, 1, 2) == 1);
}

TEST_CASE("prefix queries agree with direct summation on random boxes") {
  auto g1 = generate_martingale_set(make_schedule("harmonic", 10, 11), 1);
  auto g2 = generate_martingale_set(make_schedule("harmonic", 7, 11), 2);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const auto& g = t % 2 ? g2 : g1;
    const int n = g.dim();
    const double side = 0.01 + 0.5 * u(rng);
    Point c(u(rng) * (1 - side), n == 2 ? u(rng) * (1 - side) : 0.0);
    AxisBox b{n, c, side};
    Point hi = c + Point::Constant(side);
    CHECK(std::abs(g.box_mass(b) - oracle::box_mass(g, c, hi)) <= 1e-9);
  }
}

TEST_CASE("mass is additive across cell-aligned splits") {
  auto g = generate_martingale_set(make_schedule("harmonic", 8, 5), 2);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const int k = 1 + static_cast<int>(rng() % 7);
    const std::int64_t m = std::int64_t{1} << k;
    DyadicCube q{2, k, Index2(static_cast<std::int64_t>(rng() % m), static_cast<std::int64_t>(rng() % m))};
    AxisBox b = AxisBox::from(q);
    AxisRect left{2, b.corner, b.corner + Point(b.side / 2, b.side)};
    AxisRect right{2, b.corner + Point(b.side / 2, 0), b.corner + Point(b.side, b.side)};
    CHECK(std::abs(g.box_mass(b) - g.mass(left) - g.mass(right)) <= 1e-12);
  }
}

TEST_CASE("parent density is the mean of its children") {
  for (int n = 1; n <= 2; ++n) {
    auto g = generate_martingale_set(make_schedule("harmonic", n == 1 ? 12 : 7, 2), n);
    const int K = g.level();
    for (int k = 0; k < K; ++k) {
      const std::int64_t m = std::int64_t{1} << k;
      for (std::int64_t y = 0; y < (n == 2 ? m : 1); ++y)
        for (std::int64_t x = 0; x < m; ++x) {
          DyadicCube q{n, k, Index2(x, y)};
          double mean = 0.0;
          for (const auto& c : children(q)) mean += g.cube_density(c);
          mean /= (1 << n);
          const double d = g.cube_density(q);
          CHECK(std::abs(d - mean) <= 1e-12);
          CHECK(std::abs(d - oracle::dyadic_density(g, k, x, y)) <= 1e-12);
          CHECK(d >= 0.0);
          CHECK(d <= 1.0);
        }
    }
  }
}

TEST_CASE("densities stay in [0,1] for arbitrary boxes") {
  auto g = generate_martingale_set(make_schedule("sqrt", 8, 4), 2);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (int t = 0; t < 2000; ++t) {
    AxisBox b{2, Point(u(rng), u(rng)), 0.001 + 0.3 * std::abs(u(rng))};
    if (b.rect().clipped().empty()) continue;
    const double d = g.cube_density(b);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("grid files round-trip and reject malformed input") {
  const std::string path = "test_dyadic_roundtrip.mgr";
  for (auto g : {fixture("halfspace", 1, 6, 0.3), fixture("checkerboard", 2, 4, 2),
                 generate_martingale_set(make_schedule("harmonic", 6, 1), 2)}) {
    save_grid(g, path);
    auto back = load_grid(path);
    CHECK(back == g);
    CHECK(encode_grid(back) == encode_grid(g));
  }

  auto bytes = encode_grid(fixture("full", 1, 2));
  auto bad = bytes;
  double v = 1.5;
  std::memcpy(bad.data() + 6, &v, 8);
  try {
    decode_grid(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MassOutOfRange);
    CHECK(std::string(e.what()) == "mass out of range");
  }

  try {
    decode_grid({});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Truncated);
  }
  auto shortBytes = bytes;
  shortBytes.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_grid(shortBytes), Error);

  auto magic = bytes;
  magic[0] = 'X';
  try {
    decode_grid(magic);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadMagic);
  }
  std::remove(path.c_str());
}
