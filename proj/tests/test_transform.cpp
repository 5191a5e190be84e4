#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "smoothset/smoothgen.hpp"
#include "smoothset/transform.hpp"

using namespace smoothset;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix2 rotm(double a) {
  Matrix2 m;
  m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return m;
}

// Singular values from the characteristic polynomial of m m^T.
std::pair<double, double> char_poly_sv(const Matrix2& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double tr = a * a + b * b + c * c + d * d;
  const double det = (a * d - b * c) * (a * d - b * c);
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return {std::sqrt((tr + disc) / 2.0), std::sqrt(std::max(0.0, (tr - disc) / 2.0))};
}

// Area of the unit-square cell [x0,x0+s)x[y0,y0+s) on the side {p : dot(nrm, p) < off}.
double halfplane_cell_area(double x0, double y0, double s, const Point& nrm, double off) {
  std::vector<Point> poly{{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}};
  std::vector<Point> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    const double fp = nrm.dot(p) - off, fq = nrm.dot(q) - off;
    if (fp < 0) out.push_back(p);
    if ((fp < 0) != (fq < 0)) out.push_back(p + (q - p) * (fp / (fp - fq)));
  }
  double area = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point& p = out[i];
    const Point& q = out[(i + 1) % out.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(area) / 2.0;
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int j = a; j <= b; ++j) v.push_back(j);
  return v;
}

ModulusProfile lattice(const MassGrid& g, const std::vector<int>& scales) {
  ModulusOptions o;
  o.mode = ModulusMode::Lattice;
  return estimate_modulus(g, scales, o);
}

}  // namespace

TEST_CASE("svd of small examples") {
  auto id = svd2<double>(Matrix2::Identity());
  CHECK((id.V * id.Sigma * id.W - Matrix2::Identity()).norm() <= 1e-12);
  CHECK(id.singularValues(0) == doctest::Approx(1.0));
  CHECK(id.singularValues(1) == doctest::Approx(1.0));

  Matrix2 d;
  d << 2, 0, 0, 1;
  auto sd = svd2<double>(d);
  CHECK(sd.Sigma(0, 0) == doctest::Approx(2.0));
  CHECK(sd.Sigma(1, 1) == doctest::Approx(1.0));

  Matrix2 sh;
  sh << 1, 1, 0, 1;
  auto ss = svd2<double>(sh);
  CHECK(ss.singularValues(0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
  CHECK(ss.singularValues(1) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));

  Matrix2 r;
  r << 1, 2, 2, 4;
  auto sr = svd2<double>(r);
  CHECK_FALSE(sr.invertible);
  CHECK(sr.singularValues(1) == 0.0);

  auto sf = svd2<float>(Eigen::Matrix2f::Identity() * 3.0f);
  CHECK(sf.singularValues(0) == doctest::Approx(3.0));
}

TEST_CASE("svd invariants on random matrices") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    Matrix2 m;
    m << u(rng), u(rng), u(rng), u(rng);
    auto s = svd2<double>(m);
    CHECK((s.V * s.Sigma * s.W - m).norm() <= 1e-10);
    CHECK((s.V.transpose() * s.V - Matrix2::Identity()).norm() <= 1e-10);
    CHECK((s.W.transpose() * s.W - Matrix2::Identity()).norm() <= 1e-10);
    CHECK(s.singularValues(0) >= s.singularValues(1));
    auto [l1, l2] = char_poly_sv(m);
    CHECK(s.singularValues(0) == doctest::Approx(l1).epsilon(1e-9));
    if (s.invertible) {
      CHECK(s.singularValues(1) == doctest::Approx(l2).epsilon(1e-7));
      // ||phi^-1||^-1 <= lambda_i <= ||phi||
      double hi = 0.0, lo = 1e300;
      for (int k = 0; k < 2000; ++k) {
        const double t = kPi * k / 2000.0;
        const double len = (m * Point(std::cos(t), std::sin(t))).norm();
        hi = std::max(hi, len);
        lo = std::min(lo, len);
      }
      // sampled directions bound the true extremes from inside
      CHECK(s.singularValues(0) >= hi * (1.0 - 1e-12));
      CHECK(s.singularValues(1) <= lo * (1.0 + 1e-12));
      CHECK(s.singularValues(1) > 0.0);
    }
  }
}

TEST_CASE("rotation decomposition constants") {
  CHECK(rot_decompose(kPi / 4, 2).C == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rot_decompose(kPi / 6, 2).C == doctest::Approx(4.0 - 2.0 * std::sqrt(3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(rot_decompose(0.3, 2), Error);
  CHECK_THROWS_AS(rot_decompose(0.9, 2), Error);
  CHECK_THROWS_AS(rot_decompose(0.6, 13), Error);
}

TEST_CASE("rotation decomposition geometry") {
  for (double a : {kPi / 6, 0.6, kPi / 4}) {
    auto d = rot_decompose(a, 8);
    const double C = d.C;
    CHECK(std::abs(C - 1.0 / (1.0 + std::sin(2 * a))) <= 1e-12);
    REQUIRE(d.families.size() == 9);
    CHECK(d.families[0].size() == 1);
    CHECK(d.familyArea[0] == doctest::Approx(C).epsilon(1e-14));
    double acc = C;
    for (int k = 1; k <= 8; ++k) {
      CHECK(d.families[k].size() == (std::size_t{1} << (k + 2)));
      CHECK(std::abs(d.familyArea[k] - std::pow(C, k - 1) * (1 - C) * (1 - C)) <= 1e-6);
      acc += d.familyArea[k];
      CHECK(d.residualByLevel[k] / d.residualByLevel[k - 1] <= C + 1e-6);
    }
    CHECK(std::abs(acc + d.residualArea - 1.0) <= 1e-12);
    CHECK(std::abs(d.residualArea - (1 - C) * std::pow(C, 8)) <= 1e-12);

    // squares inside the turned square and pairwise disjoint
    const Matrix2 back = rotm(-a);
    std::vector<AxisSquare> all;
    for (int k = 0; k <= 5; ++k) all.insert(all.end(), d.families[k].begin(), d.families[k].end());
    for (const auto& s : all)
      for (double cx : {0.0, 1.0})
        for (double cy : {0.0, 1.0}) {
          const Point p = back * (s.corner + Point(cx, cy) * s.side);
          CHECK(std::abs(p.x()) <= 0.5 + 1e-12);
          CHECK(std::abs(p.y()) <= 0.5 + 1e-12);
        }
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        const auto& p = all[i];
        const auto& q = all[j];
        const double ox = std::min(p.corner.x() + p.side, q.corner.x() + q.side) - std::max(p.corner.x(), q.corner.x());
        const double oy = std::min(p.corner.y() + p.side, q.corner.y() + q.side) - std::max(p.corner.y(), q.corner.y());
        CHECK(std::max(0.0, ox) * std::max(0.0, oy) <= 1e-15);
      }
  }
  auto d5 = rot_decompose(0.6, 5);
  CHECK(d5.families[3].size() == 32);
  CHECK(std::abs(d5.familyArea[3] - d5.C * d5.C * (1 - d5.C) * (1 - d5.C)) <= 1e-6);
}

TEST_CASE("rotation reduction reproduces every angle") {
  for (int k = 0; k <= 1000; ++k) {
    const double theta = -7.0 + 14.0 * k / 1000.0;
    auto r = reduce_rotation(theta);
    CHECK((r.product() - rotm(theta)).norm() <= 1e-12);
    CHECK(r.factors.size() <= 2);
    for (double f : r.factors) {
      CHECK(std::abs(f) >= kPi / 6 - 1e-12);
      CHECK(std::abs(f) <= kPi / 4 + 1e-12);
    }
  }
}

TEST_CASE("rotation bound") {
  auto c = fixture("constant", 2, 8, 0.4);
  auto rc = verify_rotation_bound(c, kPi / 6, {3, 4}, lattice(c, {3, 4}), 1024, 32, 4);
  for (const auto& row : rc.rows) CHECK(row.gap <= 1e-12);

  auto h = fixture("halfspace", 2, 8, 0.5);
  auto rh = verify_rotation_bound(h, kPi / 6, {3, 4}, lattice(h, {3, 4}), 1024, 32, 4);
  CHECK(rh.nonSmoothInput);
  for (const auto& row : rh.rows) CHECK(row.gap <= 1.0);

  auto g = generate_martingale_set(make_schedule("harmonic", 12, 7), 2);
  const auto sc = range(3, 7);
  auto r = verify_rotation_bound(g, kPi / 6, sc, lattice(g, sc), 1024, 64, 6);
  CHECK_FALSE(r.nonSmoothInput);
  for (const auto& row : r.rows) {
    CHECK(row.cubes > 0);
    CHECK(std::isfinite(row.impliedC1));
    CHECK(row.seriesFactor == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row.decompositionGap + 3 * row.gapStderr >= row.gap);
    CHECK(row.pass);
  }
}

TEST_CASE("slab decomposition") {
  auto s = slab_decompose(2.75);
  CHECK(s.integerSlabs.size() == 2);
  REQUIRE(s.dyadicSlabs.size() == 2);
  CHECK(s.dyadicSlabs[0].k == 1);
  CHECK(s.dyadicSlabs[1].k == 2);
  for (double l : {1.0, 1.5, 2.0, 3.0, 2.3, 0.7, 5.123}) {
    auto d = slab_decompose(l);
    CHECK(std::abs(d.total_width() - l) <= 1e-12);
    double pos = 0.0;
    for (const auto& sl : d.integerSlabs) {
      CHECK(sl.lo == pos);
      pos = sl.hi;
    }
    for (const auto& sl : d.dyadicSlabs) {
      CHECK(sl.lo == pos);
      CHECK(sl.hi - sl.lo == std::ldexp(1.0, -sl.k));
      pos = sl.hi;
    }
  }
  CHECK(dilation_coefficient(2.0) == 4.5);
  CHECK(remark1_coefficient(3.0) == doctest::Approx(40.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(slab_decompose(0.0), Error);
}

TEST_CASE("dilation bound") {
  auto g = generate_martingale_set(make_schedule("harmonic", 9, 7), 2);
  const auto sc = range(3, 5);
  const auto om = lattice(g, sc);
  auto one = verify_dilation_bound(g, 1.0, sc, om);
  for (const auto& row : one.rows) CHECK(row.gap == 0.0);
  for (double l : {1.5, 2.0, 3.0, 0.6}) {
    auto rep = verify_dilation_bound(g, l, sc, om);
    for (const auto& row : rep.rows) {
      CHECK(row.boxes > 0);
      CHECK(row.reconstruction <= 1e-12);
      CHECK(row.pass);
      CHECK(row.remarkPass);
    }
  }
  // one stretched box against the brute-force oracle
  const double h = 0.125;
  const Point c(0.25, 0.5);
  const double box = oracle::box_mass(g, c, c + Point(1.5 * h, h)) / (1.5 * h * h);
  const double cube = oracle::box_mass(g, c, c + Point(h, h)) / (h * h);
  CHECK(std::abs(box - cube) <= verify_dilation_bound(g, 1.5, {3}, om, 5).rows[0].gap + 1e-12);
}

TEST_CASE("annulus decomposition") {
  for (int n : {1, 2}) {
    auto a1 = annulus_decompose(1.0, n);
    CHECK(a1.digits.empty());
    CHECK(a1.volumes.size() == 1);
    CHECK(a1.constant == n + 1.0);
    auto a = annulus_decompose(1.5, n);
    REQUIRE(a.digits.size() == 1);
    CHECK(a.digits[0] == 1);
    CHECK(a.sides[1] == 1.5);
    CHECK(a.volumes[1] == doctest::Approx(std::pow(1.5, n) - 1.0));
    CHECK(a.constant == doctest::Approx(((n + 1.0) + (std::pow(1.5, n) - 1.0) * (2.0 * n + 1.0)) / std::pow(1.5, n)));
    auto b = annulus_decompose(1.75, n);
    CHECK(b.digits == std::vector<int>{1, 1});
    double tot = 0.0;
    for (double v : b.volumes) tot += v;
    CHECK(tot == doctest::Approx(std::pow(1.75, n)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(annulus_decompose(2.5, 1), Error);
}

TEST_CASE("shifted and dilated cube checks") {
  for (auto g : {fixture("constant", 2, 8, 0.3), fixture("empty", 2, 8)}) {
    const auto om = lattice(g, {3, 4});
    for (const auto& r : lemma3a_check(g, {3, 4}, om, 2000)) CHECK(r.measured <= 1e-12);
  }
  auto g = generate_martingale_set(make_schedule("harmonic", 10, 7), 2);
  const auto sc = range(3, 7);
  const auto om = lattice(g, sc);
  for (const auto& r : lemma3a_check(g, sc, om, 20000)) {
    CHECK(r.pairs > 0);
    CHECK(r.bound == 12.0 * r.omega);
    CHECK(r.pass);
  }
  for (const auto& r : lemma3b_check(g, 1.0, sc, om)) CHECK(r.measured == 0.0);
  for (double t : {1.25, 1.75})
    for (const auto& r : lemma3b_check(g, t, sc, om)) {
      CHECK(r.cubes > 0);
      CHECK(r.pass);
    }
  CHECK_THROWS_AS(lemma3b_check(g, 2.5, sc, om), Error);

  auto hs = fixture("halfspace", 1, 10, 0.5);
  const auto oh = lattice(hs, range(2, 8));
  for (const auto& s : oh.samplesByScale) CHECK(s.omega == 1.0);
}

TEST_CASE("shear quadrature against an oversampled oracle") {
  auto g = fixture("halfspace", 2, 8, 0.5);
  const auto phi = SmoothMap::shear(0.1, 1.0);
  const AxisBox q{2, Point(0.25, 0.25), 0.25};
  auto r = region_quadrature(g, phi, q, 4096, 17);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.25, 0.5);
  const int N = 1000000;
  int hit = 0;
  for (int i = 0; i < N; ++i) {
    const double x = u(rng), y = u(rng);
    hit += x + 0.1 * std::sin(2 * kPi * y) < 0.5;
  }
  const double p = static_cast<double>(hit) / N;
  const double se = std::sqrt(p * (1 - p) / N);
  CHECK(std::abs(r.density - p) <= 3.0 * (r.stderr_ + se));
  CHECK(r.volume == doctest::Approx(q.volume()).epsilon(1e-12));
}

TEST_CASE("bilipschitz volume and mass gaps") {
  auto g = generate_martingale_set(make_schedule("harmonic", 10, 7), 2);
  for (const auto& r : theorem3_checks(g, SmoothMap::identity(2), {3, 5}, 256, 64)) {
    CHECK(r.volumeGap == 0.0);
    CHECK(r.tangent <= 1e-12);
  }
  auto sh = theorem3_checks(g, SmoothMap::shear(0.1, 1.0), {3, 7}, 1024, 256);
  for (const auto& r : sh) {
    CHECK(r.volumeGap <= 1e-12);
    CHECK(r.pairs > 0);
  }
  CHECK(sh[1].massGap < sh[0].massGap);
  auto wp = theorem3_checks(g, SmoothMap::warp(2, 0.5, 1.0), {3, 7}, 1024, 256);
  CHECK(wp[1].volumeGap < wp[0].volumeGap);
  CHECK_THROWS_AS(SmoothMap::warp(2, 1.5, 1.0), Error);
}

TEST_CASE("pullbacks") {
  auto g = generate_martingale_set(make_schedule("harmonic", 6, 7), 2);
  auto same = pullback_set(g, SmoothMap::identity(2), 6, 256);
  CHECK(same.grid == g);
  auto coarse = pullback_set(g, SmoothMap::identity(2), 4, 256);
  for (std::int64_t j = 0; j < 16; ++j)
    for (std::int64_t i = 0; i < 16; ++i)
      CHECK(std::abs(coarse.grid.cell(i, j) - oracle::dyadic_density(g, 4, i, j)) <= 3 * coarse.maxStderr + 1e-12);

  auto sw = pullback_set(g, SmoothMap::swap(), 6, 256);
  for (std::int64_t j = 0; j < 64; ++j)
    for (std::int64_t i = 0; i < 64; ++i) CHECK(sw.grid.cell(i, j) == g.cell(j, i));

  // rotated halfspace: pullback of {x < 1/2} is {y : (R(y - c) + c).x < 1/2}
  auto hs = fixture("halfspace", 2, 8, 0.5);
  const double a = kPi / 6;
  const auto phi = SmoothMap::rotation(a);
  auto pb = pullback_set(hs, phi, 5, 1024);
  const Point nrm(std::cos(a), -std::sin(a));
  const double s = 1.0 / 32;
  std::size_t tested = 0;
  for (std::int64_t j = 0; j < 32; ++j)
    for (std::int64_t i = 0; i < 32; ++i) {
      const AxisBox cell{2, Point(i * s, j * s), s};
      if (!image_inside_unit(phi, cell)) continue;
      ++tested;
      // R(y - c).x + 1/2 < 1/2  <=>  nrm . y < nrm . c
      const double want = halfplane_cell_area(i * s, j * s, s, nrm, nrm.dot(Point(0.5, 0.5))) / (s * s);
      CHECK(std::abs(pb.grid.cell(i, j) - want) <= 3 * pb.maxStderr + 1e-12);
    }
  CHECK(tested > 500);
  CHECK(pb.clippedCells > 0);
}
