#include "smoothset/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "smoothset/parallel.hpp"
#include "smoothset/rng.hpp"

namespace smoothset {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-12;

Matrix2 rot(double a) {
  Matrix2 m;
  m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return m;
}

double ratio(double gap, double omega) {
  if (omega > 0.0) return gap / omega;
  return gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// Evenly spaced subset of [0, total) of size at most cap.
std::vector<std::size_t> thin(std::size_t total, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (cap == 0 || total <= cap) {
    idx.resize(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i)
    idx.push_back(static_cast<std::size_t>((static_cast<unsigned __int128>(i) * total) / cap));
  return idx;
}

AxisBox make_box(int dim, const Point& corner, double side) { return AxisBox{dim, corner, side}; }

}  // namespace

// ---- rotation decomposition -------------------------------------------------

RotDecomposition rot_decompose(double alpha, int depth) {
  require(alpha >= kPi / 6.0 - kTol && alpha <= kPi / 4.0 + kTol, "rotation angle must lie in [pi/6, pi/4]");
  require(depth >= 0 && depth <= 12, "depth must lie in [0, 12]");
  RotDecomposition d;
  d.alpha = alpha;
  d.C = 1.0 / (1.0 + std::sin(2.0 * alpha));
  const double a = 1.0 / (std::cos(alpha) + std::sin(alpha));
  const Matrix2 R = rot(alpha);
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5}) d.outline.push_back(R * Point(sx, sy));
  std::swap(d.outline[2], d.outline[3]);  // walk the boundary in order

  d.families.push_back({AxisSquare{Point(-a / 2.0, -a / 2.0), a}});
  d.familyArea.push_back(a * a);

  // Each vertex of the turned square pokes past one side of the inscribed
  // square; the altitude from it splits that piece into two triangles.
  std::vector<RightTriangle> tri;
  for (const auto& v : d.outline) {
    if (std::abs(v.y()) >= std::abs(v.x())) {
      const Point f(v.x(), std::copysign(a / 2.0, v.y()));
      for (double ex : {-a / 2.0, a / 2.0}) tri.push_back({f, ex - f.x(), v.y() - f.y()});
    } else {
      const Point f(std::copysign(a / 2.0, v.x()), v.y());
      for (double ey : {-a / 2.0, a / 2.0}) tri.push_back({f, v.x() - f.x(), ey - f.y()});
    }
  }
  auto area_of = [](const std::vector<RightTriangle>& ts) {
    double s = 0.0;
    for (const auto& t : ts) s += t.area();
    return s;
  };
  d.residualByLevel.push_back(area_of(tri));

  for (int k = 1; k <= depth; ++k) {
    std::vector<AxisSquare> fam;
    std::vector<RightTriangle> next;
    double area = 0.0;
    for (const auto& t : tri) {
      const double p = std::abs(t.px), q = std::abs(t.qy);
      const double s = p * q / (p + q);
      const double sx = std::copysign(s, t.px), sy = std::copysign(s, t.qy);
      fam.push_back({Point(t.r.x() + std::min(0.0, sx), t.r.y() + std::min(0.0, sy)), s});
      area += s * s;
      next.push_back({Point(t.r.x() + sx, t.r.y()), t.px - sx, sy});
      next.push_back({Point(t.r.x(), t.r.y() + sy), sx, t.qy - sy});
    }
    d.families.push_back(std::move(fam));
    d.familyArea.push_back(area);
    tri.swap(next);
    d.residualByLevel.push_back(area_of(tri));
  }
  d.residual = std::move(tri);
  d.residualArea = d.residualByLevel.back();
  return d;
}

Matrix2 RotationReduction::product() const {
  Matrix2 m = rot(quarterTurns * kPi / 2.0);
  for (double f : factors) m = m * rot(f);
  return m;
}

RotationReduction reduce_rotation(double theta) {
  require(std::isfinite(theta), "angle must be finite");
  RotationReduction r;
  const double quarter = kPi / 2.0;
  double q = std::floor(theta / quarter);
  double phi = theta - q * quarter;
  if (phi >= quarter) {
    phi -= quarter;
    q += 1.0;
  }
  if (phi < 0.0) phi = 0.0;
  long turns = static_cast<long>(std::fmod(q, 4.0));
  const double lo = kPi / 6.0, mid = kPi / 4.0, hi = kPi / 3.0;
  if (phi == 0.0) {
  } else if (phi >= lo && phi <= mid) {
    r.factors = {phi};
  } else if (phi > mid && phi <= hi) {
    turns += 1;
    r.factors = {-(quarter - phi)};
  } else if (phi > hi) {
    r.factors = {phi / 2.0, phi / 2.0};
  } else {
    // R(phi) = R(pi/2) R(-b)^2 with b = (pi/2 - phi)/2 in (pi/6, pi/4]
    const double b = (quarter - phi) / 2.0;
    turns += 1;
    r.factors = {-b, -b};
  }
  r.quarterTurns = static_cast<int>(((turns % 4) + 4) % 4);
  return r;
}

// ---- rotation bound ---------------------------------------------------------

RotationBoundReport verify_rotation_bound(const MassGrid& grid, double alpha, const std::vector<int>& scales,
                                          const ModulusProfile& omega, int samples, std::size_t maxCubes,
                                          int depth) {
  require(grid.dim() == 2, "rotation bound needs n = 2");
  const auto dec = rot_decompose(alpha, depth);
  RotationBoundReport rep;
  rep.alpha = alpha;
  rep.C = dec.C;
  double series = 0.0;
  for (int k = 1; k < 4000; ++k) series += k * std::pow(dec.C, k);
  const double seriesFactor = (1.0 - dec.C) * (1.0 - dec.C) / dec.C * series;
  const double n3 = 8.0;
  const std::uint64_t salt = splitmix64(std::bit_cast<std::uint64_t>(alpha) ^ 0x207A);
  bool rough = !scales.empty();

  for (int j : scales) {
    require(j >= 0 && j <= grid.level(), "scale beyond resolution");
    RotationBoundRow row;
    row.level = j;
    row.omega = omega.envelope_at(j);
    row.seriesFactor = seriesFactor;
    row.translationBound = 3.0 * n3 * row.omega;
    if (row.omega < 0.99) rough = false;
    const double h = std::ldexp(1.0, -j);
    const double r = h * (std::cos(alpha) + std::sin(alpha)) / 2.0;
    const Point tau(h * std::cos(alpha), -h * std::sin(alpha));
    const double step = h / 4.0;
    std::vector<Point> centres;
    const long m = std::lround(1.0 / step);
    for (long b = 0; b <= m; ++b)
      for (long a = 0; a <= m; ++a) {
        const Point p(a * step, b * step);
        bool ok = true;
        for (int i = 0; i < 2; ++i) {
          ok = ok && p[i] - r >= 0.0 && p[i] + r <= 1.0;
          ok = ok && p[i] + tau[i] - h / 2.0 >= 0.0 && p[i] + tau[i] + h / 2.0 <= 1.0;
        }
        if (ok) centres.push_back(p);
      }
    const auto pick = thin(centres.size(), maxCubes);
    row.cubes = pick.size();
    for (std::size_t idx : pick) {
      const Point& p = centres[idx];
      const AxisBox qt = AxisBox::centered(p, h, 2);
      const double dq = grid.cube_density(qt);
      const auto rq = region_quadrature(grid, SmoothMap::rotation(alpha, p), qt, samples, cube_key(qt, salt));
      const double gap = std::abs(rq.density - dq);
      if (gap > row.gap) {
        row.gap = gap;
        row.gapStderr = rq.stderr_;
      }
      double moment = 0.0;
      for (std::size_t k = 0; k < dec.families.size(); ++k)
        for (const auto& s : dec.families[k]) {
          const AxisBox sq = make_box(2, p + h * s.corner, h * s.side);
          const double ds = grid.cube_density(sq);
          moment += s.area() * (ds - dq);
          row.squareC1 = std::max(row.squareC1, ratio(std::abs(ds - dq), std::max<double>(k, 1) * row.omega));
        }
      row.decompositionGap = std::max(row.decompositionGap, std::abs(moment) + dec.residualArea);
      const double dt = grid.cube_density(AxisBox::centered(p + tau, h, 2));
      row.translation = std::max(row.translation, std::abs(dq - dt));
    }
    row.impliedC1 = ratio(row.gap, row.omega);
    row.pass = row.translation <= row.translationBound + kTol;
    rep.rows.push_back(row);
  }
  rep.nonSmoothInput = rough;
  return rep;
}

// ---- dilation bound ---------------------------------------------------------

double SlabDecomposition::total_width() const {
  double w = 0.0;
  for (const auto& s : integerSlabs) w += s.hi - s.lo;
  for (const auto& s : dyadicSlabs) w += s.hi - s.lo;
  return w;
}

SlabDecomposition slab_decompose(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "dilation factor must be positive");
  SlabDecomposition d;
  d.lambda = lambda;
  const double whole = std::floor(lambda);
  for (int j = 0; j < static_cast<int>(whole); ++j) d.integerSlabs.push_back({0, double(j), double(j + 1)});
  double pos = whole, rest = lambda - whole;
  for (int k = 1; k <= 60 && rest > 0.0; ++k) {
    const double w = std::ldexp(1.0, -k);
    if (rest >= w) {
      d.dyadicSlabs.push_back({k, pos, pos + w});
      pos += w;
      rest -= w;
    }
  }
  return d;
}

double dilation_coefficient(double lambda) {
  require(lambda > 0.0, "dilation factor must be positive");
  const double l = lambda >= 1.0 ? lambda : 1.0 / lambda;
  return l + 1.0 + 3.0 / l;
}

double remark1_coefficient(double lambda) {
  require(lambda > 0.0, "dilation factor must be positive");
  return 4.0 * (lambda + 1.0 / lambda);
}

DilationBoundReport verify_dilation_bound(const MassGrid& grid, double lambda, const std::vector<int>& scales,
                                          const ModulusProfile& omega, int stride) {
  const int n = grid.dim();
  const int K = grid.level();
  DilationBoundReport rep;
  rep.lambda = lambda;
  rep.coefficient = dilation_coefficient(lambda);
  rep.remarkCoefficient = remark1_coefficient(lambda);
  const double mu = lambda >= 1.0 ? lambda : 1.0 / lambda;
  const int axis = lambda >= 1.0 || n == 1 ? 0 : 1;
  rep.slabs = slab_decompose(mu);
  const auto& sd = rep.slabs;

  for (int j : scales) {
    require(j >= 0 && j <= K, "scale beyond resolution");
    const int S = stride > 0 ? stride : std::min(K, j + 4);
    require(S >= j && S <= K, "stride must lie in [j, K]");
    DilationBoundRow row;
    row.level = j;
    row.omega = omega.envelope_at(j);
    row.bound = rep.coefficient * row.omega;
    row.remarkBound = rep.remarkCoefficient * row.omega;
    const double h = std::ldexp(1.0, -j);
    const double side = lambda >= 1.0 ? h : lambda * h;  // side of the comparison cube
    const double unit = std::ldexp(1.0, -S);
    const double longSide = mu * side;
    const long lastAlong = static_cast<long>(std::floor((1.0 - longSide) / unit + 1e-9));
    const long lastAcross = n == 2 ? static_cast<long>(std::floor((1.0 - side) / unit + 1e-9)) : 0;
    if (lastAlong < 0 || lastAcross < 0) {
      rep.rows.push_back(row);
      continue;
    }
    for (long b = 0; b <= lastAcross; ++b)
      for (long a = 0; a <= lastAlong; ++a) {
        Point c = Point::Zero();
        c[axis] = a * unit;
        if (n == 2) c[1 - axis] = b * unit;
        auto slab_rect = [&](double lo, double hi) {
          AxisRect r{n, c, c};
          for (int i = 0; i < n; ++i) r.hi[i] = c[i] + side;
          r.lo[axis] = c[axis] + lo * side;
          r.hi[axis] = c[axis] + hi * side;
          return r;
        };
        const double dq = grid.density(slab_rect(0.0, 1.0));
        const double db = grid.density(slab_rect(0.0, mu));
        ++row.boxes;
        row.gap = std::max(row.gap, std::abs(db - dq));
        double recon = 0.0;
        for (const auto& s : sd.integerSlabs) {
          const double ds = grid.density(slab_rect(s.lo, s.hi));
          recon += (s.hi - s.lo) / mu * ds;
          row.worstSlabRatio = std::max(row.worstSlabRatio, ratio(std::abs(ds - dq), mu * row.omega));
        }
        for (const auto& s : sd.dyadicSlabs) {
          const AxisRect sr = slab_rect(s.lo, s.hi);
          if (sr.empty()) continue;  // narrower than double resolution
          const double ds = grid.density(sr);
          recon += (s.hi - s.lo) / mu * ds;
          row.worstSlabRatio =
              std::max(row.worstSlabRatio, ratio(std::abs(ds - dq), (mu + 1.0 + s.k) * row.omega));
        }
        row.reconstruction = std::max(row.reconstruction, std::abs(db - recon));
      }
    row.pass = row.gap <= row.bound + kTol;
    row.remarkPass = row.gap <= row.remarkBound + kTol;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---- centred-cube estimates ----------------------------------------------------

AnnulusDecomposition annulus_decompose(double t, int n) {
  require(t >= 1.0 && t <= 2.0, "t must lie in [1, 2]");
  require(n == 1 || n == 2, "dimension must be 1 or 2");
  AnnulusDecomposition d;
  d.t = t;
  d.n = n;
  double rest = t - 1.0;
  int last = 0;
  for (int k = 1; k <= 60; ++k) {
    const double w = std::ldexp(1.0, -k);
    const int digit = rest >= w ? 1 : 0;
    rest -= digit * w;
    d.digits.push_back(digit);
    if (digit) last = k;
    if (rest <= 0.0) break;
  }
  d.digits.resize(static_cast<std::size_t>(last));
  d.sides.push_back(1.0);
  d.volumes.push_back(1.0);
  for (std::size_t m = 1; m <= d.digits.size(); ++m) {
    const double s = d.sides.back() + d.digits[m - 1] * std::ldexp(1.0, -static_cast<int>(m));
    d.volumes.push_back(std::pow(s, n) - std::pow(d.sides.back(), n));
    d.sides.push_back(s);
  }
  const double tn = std::pow(t, n);
  for (std::size_t m = 0; m < d.volumes.size(); ++m)
    d.constant += d.volumes[m] / tn * (n * (static_cast<double>(m) + 1.0) + 1.0);
  return d;
}

double lemma3b_constant(double t, int n) { return annulus_decompose(t, n).constant; }

std::vector<Lemma3aRow> lemma3a_check(const MassGrid& grid, const std::vector<int>& scales,
                                      const ModulusProfile& omega, std::size_t pairsPerScale, std::uint64_t seed) {
  const int n = grid.dim();
  std::vector<Lemma3aRow> rows;
  for (int j : scales) {
    require(j >= 1 && j <= grid.level(), "scale must lie in [1, K]");
    Lemma3aRow row;
    row.level = j;
    row.omega = omega.envelope_at(j);
    row.bound = 3.0 * n * n * row.omega;
    row.shiftedBound = 3.0 * n * row.omega;
    const double h = std::ldexp(1.0, -j);
    for (std::size_t i = 0; i < pairsPerScale; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(j), i);
      Point c = Point::Zero(), d = Point::Zero();
      for (int a = 0; a < n; ++a) {
        c[a] = rng.uniform() * (1.0 - h);
        d[a] = (2.0 * rng.uniform() - 1.0) * h;
      }
      const AxisBox q = make_box(n, c, h);
      const AxisBox qt = q.translated(d);
      const double dq = grid.cube_density(q);
      if (qt.inside_unit() && d.head(n).cwiseAbs().maxCoeff() < h) {
        ++row.pairs;
        row.measured = std::max(row.measured, std::abs(dq - grid.cube_density(qt)));
      }
      Point e = Point::Zero();
      const int ax = static_cast<int>(i % static_cast<std::size_t>(n));
      e[ax] = d[ax];
      const AxisBox qs = q.translated(e);
      if (qs.inside_unit()) row.shifted = std::max(row.shifted, std::abs(dq - grid.cube_density(qs)));
    }
    row.pass = row.measured <= row.bound + kTol && row.shifted <= row.shiftedBound + kTol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Lemma3bRow> lemma3b_check(const MassGrid& grid, double t, const std::vector<int>& scales,
                                      const ModulusProfile& omega) {
  const int n = grid.dim();
  const double cnt = lemma3b_constant(t, n);
  std::vector<Lemma3bRow> rows;
  for (int j : scales) {
    require(j >= 0 && j <= grid.level(), "scale beyond resolution");
    Lemma3bRow row;
    row.level = j;
    row.t = t;
    row.cnt = cnt;
    row.omega = omega.envelope_at(j);
    row.bound = cnt * row.omega;
    const double h = std::ldexp(1.0, -j);
    const double step = h / 4.0;
    const long m = 1L << (j + 2);
    for (long b = 0; b <= (n == 2 ? m : 0); ++b)
      for (long a = 0; a <= m; ++a) {
        const Point x(a * step, n == 2 ? b * step : 0.0);
        const AxisBox q = AxisBox::centered(x, h, n);
        const AxisBox tq = q.scaled(t);
        if (!tq.inside_unit()) continue;
        ++row.cubes;
        row.measured = std::max(row.measured, std::abs(grid.cube_density(q) - grid.cube_density(tq)));
      }
    if (row.cubes == 0) throw Error(ErrorKind::RegionEscapesDomain, "region escapes domain");
    row.pass = row.measured <= row.bound + kTol;
    rows.push_back(row);
  }
  return rows;
}

// ---- bilipschitz invariance -----------------------------------------------------

std::vector<Theorem3Row> theorem3_checks(const MassGrid& grid, const SmoothMap& phi, const std::vector<int>& scales,
                                         int samples, std::size_t maxPairs, int workers) {
  const int n = grid.dim();
  require(phi.dim() == n, "map dimension does not match grid");
  const auto ver = phi.verify();
  if (!ver.ok) throw Error(ErrorKind::MapRejected, "map rejected: " + ver.reason);

  std::vector<Theorem3Row> rows;
  for (int j : scales) {
    require(j >= 1 && j <= grid.level(), "scale must lie in [1, K]");
    std::vector<ConsecutivePair> pairs;
    for_each_consecutive_pair(n, j, j, [&](const ConsecutivePair& p) { pairs.push_back(p); });
    const auto pick = thin(pairs.size(), maxPairs);

    struct Partial {
      std::size_t pairs = 0, skipped = 0;
      double vol = 0.0, mass = 0.0, tangent = 0.0, err = 0.0;
    };
    constexpr std::size_t chunk = 16;
    std::vector<Partial> parts((pick.size() + chunk - 1) / chunk);
    parallel_chunks(
        pick.size(), chunk,
        [&](std::size_t c, std::size_t begin, std::size_t end) {
          Partial& out = parts[c];
          for (std::size_t i = begin; i < end; ++i) {
            const auto& pr = pairs[pick[i]];
            const AffineMap T = phi.tangent_at(pr.first.center());
            auto affine_inside = [&](const AxisBox& b) {
              for (int corner = 0; corner < (1 << n); ++corner) {
                Point u = b.corner;
                for (int a = 0; a < n; ++a)
                  if (corner >> a & 1) u[a] += b.side;
                const Point y = T(u);
                for (int a = 0; a < n; ++a)
                  if (y[a] < 0.0 || y[a] > 1.0) return false;
              }
              return true;
            };
            if (!image_inside_unit(phi, pr.first) || !image_inside_unit(phi, pr.second) ||
                !affine_inside(pr.first)) {
              ++out.skipped;
              continue;
            }
            const std::uint64_t k1 = cube_key(pr.first, 0x7E03), k2 = cube_key(pr.second, 0x7E03);
            const auto a = region_quadrature(grid, phi, pr.first, samples, k1);
            const auto b = region_quadrature(grid, phi, pr.second, samples, k2);
            const auto t = affine_quadrature(grid, T, pr.first, samples, k1);
            const double vq = pr.first.volume();
            ++out.pairs;
            out.vol = std::max(out.vol, std::abs(a.volume - b.volume) / vq);
            out.mass = std::max(out.mass, std::abs(a.mass - b.mass) / vq);
            out.tangent = std::max(out.tangent, std::abs(a.mass - t.mass) / vq);
            out.err = std::max({out.err, a.stderr_ * a.volume / vq, b.stderr_ * b.volume / vq});
          }
        },
        workers);
    Theorem3Row row;
    row.level = j;
    for (const auto& p : parts) {
      row.pairs += p.pairs;
      row.skipped += p.skipped;
      row.volumeGap = std::max(row.volumeGap, p.vol);
      row.massGap = std::max(row.massGap, p.mass);
      row.tangent = std::max(row.tangent, p.tangent);
      row.stderr_ = std::max(row.stderr_, p.err);
    }
    rows.push_back(row);
  }
  return rows;
}

PullbackResult pullback_set(const MassGrid& grid, const SmoothMap& phi, int level, int samples, int workers) {
  const int n = grid.dim();
  require(phi.dim() == n, "map dimension does not match grid");
  require(level >= 0 && n * level <= 26, "pullback resolution out of range");
  const std::int64_t side = std::int64_t{1} << level;
  const std::size_t count = static_cast<std::size_t>(n == 2 ? side * side : side);
  std::vector<double> cells(count, 0.0);
  std::vector<double> err(count, 0.0);
  std::vector<std::uint8_t> clipped(count, 0);
  parallel_chunks(
      count, 256,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          const DyadicCube q{n, level,
                             Index2(static_cast<std::int64_t>(c) % side, n == 2 ? static_cast<std::int64_t>(c) / side : 0)};
          const AxisBox box = AxisBox::from(q);
          const auto r = region_quadrature(grid, phi, box, samples, cube_key(box, 0x9B), true);
          cells[c] = std::clamp(r.density, 0.0, 1.0);
          err[c] = r.stderr_;
          clipped[c] = r.dropped > 0;
        }
      },
      workers);
  PullbackResult out{MassGrid(n, level, std::move(cells))};
  for (std::size_t c = 0; c < count; ++c) {
    out.maxStderr = std::max(out.maxStderr, err[c]);
    out.clippedCells += clipped[c];
  }
  return out;
}

}  // namespace smoothset
