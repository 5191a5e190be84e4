#include "smoothset/modulus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "smoothset/parallel.hpp"
#include "smoothset/rng.hpp"

namespace smoothset {

namespace {

struct Best {
  double value = -1.0;
  std::uint64_t order = 0;
  PairWitness witness;
  double stderr_ = 0.0;
};

void merge(Best& into, const Best& from) {
  if (from.value > into.value) into = from;
}

// Cell-aligned lattice sweep: with S <= K every cube is a union of cells, so
// densities are exact prefix-table differences.
Best lattice_sweep(const MassGrid& g, int j, int S, std::uint64_t& pairCount, int workers) {
  const int K = g.level();
  const int n = g.dim();
  const std::int64_t steps = std::int64_t{1} << S;
  const std::int64_t h = std::int64_t{1} << (S - j);
  const std::int64_t sc = std::int64_t{1} << (K - S);
  const std::int64_t hc = std::int64_t{1} << (K - j);
  const double cells = std::pow(static_cast<double>(hc), n);
  const std::int64_t alongCount = steps - 2 * h + 1;
  const std::int64_t acrossCount = n == 2 ? steps - h + 1 : 1;
  if (alongCount <= 0) {
    pairCount = 0;
    return Best{0.0, 0, {}, 0.0};
  }
  const std::uint64_t total = static_cast<std::uint64_t>(n) * acrossCount * alongCount;
  pairCount = total;
  const std::size_t chunk = 1 << 15;
  const std::size_t chunks = (total + chunk - 1) / chunk;
  std::vector<Best> partial(chunks);
  parallel_chunks(
      total, chunk,
      [&](std::size_t c, std::size_t b, std::size_t e) {
        Best best;
        for (std::size_t k = b; k < e; ++k) {
          const std::int64_t axis = static_cast<std::int64_t>(k) / (acrossCount * alongCount);
          const std::int64_t rem = static_cast<std::int64_t>(k) % (acrossCount * alongCount);
          const std::int64_t across = rem / alongCount;
          const std::int64_t along = rem % alongCount;
          std::int64_t i0, j0, i1, j1;
          if (axis == 0) {
            i0 = along * sc;
            j0 = across * sc;
            i1 = i0 + hc;
            j1 = j0;
          } else {
            i0 = across * sc;
            j0 = along * sc;
            i1 = i0;
            j1 = j0 + hc;
          }
          double d0, d1;
          if (n == 1) {
            d0 = g.cell_sum(i0, i0 + hc) / cells;
            d1 = g.cell_sum(i1, i1 + hc) / cells;
          } else {
            d0 = g.cell_sum(i0, i0 + hc, j0, j0 + hc) / cells;
            d1 = g.cell_sum(i1, i1 + hc, j1, j1 + hc) / cells;
          }
          const double gap = std::abs(d0 - d1);
          if (gap > best.value) {
            best.value = gap;
            best.order = k;
            const double unit = std::ldexp(1.0, -K);
            const double side = std::ldexp(1.0, -j);
            PairWitness w;
            w.pair.sharedFaceAxis = static_cast<int>(axis);
            w.pair.first = AxisBox{n, Point(i0 * unit, n == 2 ? j0 * unit : 0.0), side};
            w.pair.second = AxisBox{n, Point(i1 * unit, n == 2 ? j1 * unit : 0.0), side};
            w.densityFirst = d0;
            w.densitySecond = d1;
            best.witness = w;
          }
        }
        partial[c] = best;
      },
      workers);
  Best out;
  for (const auto& p : partial) merge(out, p);
  if (out.value < 0.0) out.value = 0.0;
  return out;
}

std::uint64_t angle_salt(double angle) { return splitmix64(std::bit_cast<std::uint64_t>(angle) ^ 0x707A7E); }

QuadratureResult rotated_density(const MassGrid& g, const AxisBox& b, double angle, const Point& pivot, int samples) {
  return region_quadrature(g, SmoothMap::rotation(angle, pivot), b, samples, cube_key(b, angle_salt(angle)));
}

Best rotated_sweep(const MassGrid& g, int j, int S, double angle, int samples, std::size_t maxPairs,
                   std::uint64_t& pairCount, int& effectiveStride, int workers) {
  require(g.dim() == 2, "rotated mode needs n = 2");
  const double side = std::ldexp(1.0, -j);
  std::vector<PairWitness> cands;
  const std::int64_t steps = std::int64_t{1} << S;
  const double unit = 1.0 / static_cast<double>(steps);
  for (int axis = 0; axis < 2; ++axis) {
    for (std::int64_t y = 0; y <= steps; ++y) {
      for (std::int64_t x = 0; x <= steps; ++x) {
        const Point pivot(x * unit, y * unit);
        PairWitness w;
        w.rotated = true;
        w.angle = angle;
        w.pivot = pivot;
        w.pair.sharedFaceAxis = axis;
        w.pair.first = AxisBox::centered(pivot, side, 2);
        Point shift = Point::Zero();
        shift[axis] = side;
        w.pair.second = w.pair.first.translated(shift);
        const SmoothMap rot = SmoothMap::rotation(angle, pivot);
        if (!image_inside_unit(rot, w.pair.first, 1) || !image_inside_unit(rot, w.pair.second, 1)) continue;
        cands.push_back(w);
      }
    }
  }
  // Thin the candidate list evenly when it exceeds the cap.
  std::size_t every = 1;
  if (maxPairs > 0 && cands.size() > maxPairs) every = (cands.size() + maxPairs - 1) / maxPairs;
  std::vector<PairWitness> pairs;
  for (std::size_t k = 0; k < cands.size(); k += every) pairs.push_back(cands[k]);
  pairCount = pairs.size();
  effectiveStride = S;
  std::vector<Best> partial((pairs.size() + 63) / 64);
  parallel_chunks(
      pairs.size(), 64,
      [&](std::size_t c, std::size_t b, std::size_t e) {
        Best best;
        for (std::size_t k = b; k < e; ++k) {
          PairWitness w = pairs[k];
          const auto q0 = rotated_density(g, w.pair.first, angle, w.pivot, samples);
          const auto q1 = rotated_density(g, w.pair.second, angle, w.pivot, samples);
          const double gap = std::abs(q0.density - q1.density);
          if (gap > best.value) {
            w.densityFirst = q0.density;
            w.densitySecond = q1.density;
            best.value = gap;
            best.order = k;
            best.witness = w;
            best.stderr_ = std::hypot(q0.stderr_, q1.stderr_);
          }
        }
        partial[c] = best;
      },
      workers);
  Best out;
  for (const auto& p : partial) merge(out, p);
  if (out.value < 0.0) out.value = 0.0;
  return out;
}

}  // namespace

const ModulusSample* ModulusProfile::find(int level) const {
  for (const auto& s : samplesByScale)
    if (s.level == level) return &s;
  return nullptr;
}

double ModulusProfile::omega_at(int level) const {
  const auto* s = find(level);
  require(s != nullptr, "scale " + std::to_string(level) + " not in profile");
  return s->omega;
}

double ModulusProfile::envelope_at(int level) const {
  require(!samplesByScale.empty(), "empty modulus profile");
  for (const auto& s : samplesByScale)
    if (s.level >= level) return s.envelope;
  return samplesByScale.back().envelope;
}

std::string ModulusProfile::mode_label(const ModulusSample& s) const {
  std::ostringstream o;
  switch (mode) {
    case ModulusMode::Dyadic: o << "dyadic"; break;
    case ModulusMode::Lattice: o << "lattice(" << s.stride << ")"; break;
    case ModulusMode::Rotated: o << "rotated(" << angle << ";" << s.stride << ")"; break;
  }
  return o.str();
}

ModulusProfile estimate_modulus(const MassGrid& grid, std::vector<int> scales, const ModulusOptions& opt) {
  require(!scales.empty(), "empty scale list");
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  const int K = grid.level();
  ModulusProfile prof;
  prof.mode = opt.mode;
  prof.angle = opt.angle;
  prof.samples = opt.samples;
  for (int j : scales) {
    require(j >= 0 && j <= K, "scale " + std::to_string(j) + " outside 0..K");
    if (opt.mode == ModulusMode::Rotated)
      require(j <= K - 2, "rotated mode needs scales <= K - 2");
    ModulusSample s;
    s.level = j;
    s.t = std::ldexp(1.0, -j);
    Best best;
    switch (opt.mode) {
      case ModulusMode::Dyadic:
        s.stride = j;
        best = lattice_sweep(grid, j, j, s.pairCount, opt.workers);
        break;
      case ModulusMode::Lattice: {
        const int S = opt.stride > 0 ? opt.stride : std::min(K, j + 4);
        require(S >= j && S <= K, "stride must satisfy j <= S <= K");
        s.stride = S;
        best = lattice_sweep(grid, j, S, s.pairCount, opt.workers);
        break;
      }
      case ModulusMode::Rotated: {
        const int S = opt.stride > 0 ? std::max(opt.stride, j) : std::min(K, j + 4);
        best = rotated_sweep(grid, j, S, opt.angle, opt.samples, opt.maxPairs, s.pairCount, s.stride, opt.workers);
        s.stderr_ = best.stderr_;
        break;
      }
    }
    s.omega = best.value;
    s.hasWitness = s.pairCount > 0;
    s.witness = best.witness;
    prof.samplesByScale.push_back(s);
  }
  double run = 0.0;
  for (auto it = prof.samplesByScale.rbegin(); it != prof.samplesByScale.rend(); ++it) {
    run = std::max(run, it->omega);
    it->envelope = run;
  }
  return prof;
}

ModulusProfile dyadic_profile(const MassGrid& grid, int workers) {
  std::vector<int> all(static_cast<std::size_t>(grid.level()) + 1);
  for (int j = 0; j <= grid.level(); ++j) all[j] = j;
  ModulusOptions opt;
  opt.workers = workers;
  return estimate_modulus(grid, all, opt);
}

double evaluate_witness(const MassGrid& grid, const PairWitness& w, int samples) {
  if (!w.rotated) return std::abs(grid.cube_density(w.pair.first) - grid.cube_density(w.pair.second));
  const auto a = rotated_density(grid, w.pair.first, w.angle, w.pivot, samples);
  const auto b = rotated_density(grid, w.pair.second, w.angle, w.pivot, samples);
  return std::abs(a.density - b.density);
}

StepCheck dyadic_step_check(const MassGrid& grid, int level, const ModulusProfile& omega) {
  require(level >= 0 && level < grid.level(), "step check needs j < K");
  const int n = grid.dim();
  const std::int64_t m = std::int64_t{1} << level;
  const std::int64_t rows = n == 2 ? m : 1;
  double worst = 0.0;
  for (std::int64_t y = 0; y < rows; ++y) {
    for (std::int64_t x = 0; x < m; ++x) {
      DyadicCube q{n, level, Index2(x, y)};
      const double dq = grid.cube_density(q);
      for (const auto& c : children(q)) worst = std::max(worst, std::abs(grid.cube_density(c) - dq));
    }
  }
  StepCheck r;
  r.level = level;
  r.measuredMax = worst;
  r.bound = n * omega.envelope_at(level);
  r.pass = worst <= r.bound + 1e-12;
  return r;
}

StepCheck dyadic_step_check(const MassGrid& grid, int level) {
  return dyadic_step_check(grid, level, dyadic_profile(grid));
}

GridComparison compare_grid_definitions(const MassGrid& grid, const std::vector<int>& scales, int stride,
                                        const std::vector<double>& angles, int samples, std::size_t maxPairs,
                                        int workers) {
  GridComparison out;
  ModulusOptions o;
  o.workers = workers;
  out.dyadic = estimate_modulus(grid, scales, o);
  o.mode = ModulusMode::Lattice;
  o.stride = stride;
  out.lattice = estimate_modulus(grid, scales, o);
  for (double a : angles) {
    ModulusOptions r = o;
    r.mode = ModulusMode::Rotated;
    r.angle = a;
    r.samples = samples;
    r.maxPairs = maxPairs;
    out.rotated.push_back(estimate_modulus(grid, scales, r));
  }
  auto ratio = [](double num, double den) {
    if (den > 0.0) return num / den;
    return num > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  for (std::size_t i = 0; i < out.dyadic.samplesByScale.size(); ++i) {
    GridComparisonRow row;
    row.level = out.dyadic.samplesByScale[i].level;
    row.dyadic = out.dyadic.samplesByScale[i].omega;
    row.lattice = out.lattice.samplesByScale[i].omega;
    row.latticeRatio = ratio(row.lattice, row.dyadic);
    out.maxRatio = std::max(out.maxRatio, row.latticeRatio);
    for (const auto& p : out.rotated) {
      row.rotated.push_back(p.samplesByScale[i].omega);
      row.rotatedRatio.push_back(ratio(row.rotated.back(), row.dyadic));
      out.maxRatio = std::max(out.maxRatio, row.rotatedRatio.back());
    }
    out.rows.push_back(row);
  }
  // A profile "decays" when its finest value sits clearly below its coarsest
  // one: by 10% and by three quadrature standard errors.
  auto vanishes = [](const ModulusProfile& p) {
    for (const auto& s : p.samplesByScale)
      if (s.omega > 1e-12) return false;
    return true;
  };
  auto decays = [&](const ModulusProfile& p) {
    const auto& a = p.samplesByScale.front();
    const auto& b = p.samplesByScale.back();
    const double slack = std::max(0.1 * a.omega, 3.0 * std::hypot(a.stderr_, b.stderr_));
    return vanishes(p) || b.omega < a.omega - slack;
  };
  std::vector<const ModulusProfile*> all{&out.dyadic, &out.lattice};
  for (const auto& p : out.rotated) all.push_back(&p);
  bool allVanish = true, allDecay = true, noneDecay = true;
  for (const auto* p : all) {
    allVanish = allVanish && vanishes(*p);
    const bool d = decays(*p);
    allDecay = allDecay && d;
    noneDecay = noneDecay && !d;
  }
  out.trend = allVanish ? "all vanish" : allDecay ? "all decay" : noneDecay ? "none decay" : "mixed";
  const bool bounded = std::isfinite(out.maxRatio);
  out.classification = (out.trend != "mixed" && bounded) || allVanish ? "consistent" : "inconsistent";
  return out;
}

std::string modulus_csv(const ModulusProfile& p, bool header) {
  std::ostringstream o;
  o.precision(17);
  if (header) o << "mode,j,t,omega,pairCount\n";
  for (const auto& s : p.samplesByScale)
    o << p.mode_label(s) << ',' << s.level << ',' << s.t << ',' << s.omega << ',' << s.pairCount << '\n';
  return o.str();
}

}  // namespace smoothset
