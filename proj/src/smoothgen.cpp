#include "smoothset/smoothgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "smoothset/rng.hpp"

namespace smoothset {

namespace {

constexpr std::int64_t kQ = std::int64_t{1} << 26;

// The six ways to place two +1 and two -1 on the quadrants.
constexpr std::array<std::array<int, 4>, 6> kPatterns{{
    {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1},
    {-1, 1, 1, -1}, {-1, 1, -1, 1}, {-1, -1, 1, 1},
}};

std::int64_t eps_quanta(const MartingaleSchedule& s, int k) {
  const double e = k - 1 < static_cast<int>(s.eps.size()) ? s.eps[k - 1] : 0.0;
  return static_cast<std::int64_t>(std::floor(std::max(0.0, e) * static_cast<double>(kQ)));
}

// Truncates toward zero, then restores the zero sum by walking entries back
// toward zero, which cannot break |e_c| <= bound.
template <std::size_t N>
void quantize_zero_sum(const std::array<double, N>& in, std::array<std::int64_t, N>& out) {
  std::int64_t r = 0;
  for (std::size_t c = 0; c < N; ++c) {
    out[c] = static_cast<std::int64_t>(std::trunc(in[c]));
    r += out[c];
  }
  while (r != 0) {
    std::size_t pick = 0;
    if (r > 0) {
      for (std::size_t c = 1; c < N; ++c)
        if (out[c] > out[pick]) pick = c;
      --out[pick];
      --r;
    } else {
      for (std::size_t c = 1; c < N; ++c)
        if (out[c] < out[pick]) pick = c;
      ++out[pick];
      ++r;
    }
  }
}

std::vector<std::int64_t> cascade1(const MartingaleSchedule& s) {
  std::vector<std::int64_t> d{std::llround(s.startDensity * static_cast<double>(kQ))};
  for (int k = 1; k <= s.levels; ++k) {
    const std::int64_t eh = eps_quanta(s, k);
    const std::int64_t m = static_cast<std::int64_t>(d.size());
    std::vector<std::int64_t> next(2 * d.size());
    for (std::int64_t i = 0; i < m; ++i) {
      const double dl = static_cast<double>(d[std::max<std::int64_t>(i - 1, 0)]);
      const double dr = static_cast<double>(d[std::min<std::int64_t>(i + 1, m - 1)]);
      CounterRng rng(s.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
      const double sign = (rng.next() >> 63) ? 1.0 : -1.0;
      const double e = (dr - dl) / 8.0 + sign * 0.5 * static_cast<double>(eh);
      const double bound = static_cast<double>(std::min({eh, d[i], kQ - d[i]}));
      const std::int64_t q = static_cast<std::int64_t>(std::trunc(std::clamp(e, -bound, bound)));
      next[2 * i] = d[i] - q;
      next[2 * i + 1] = d[i] + q;
    }
    d.swap(next);
  }
  return d;
}

std::vector<std::int64_t> cascade2(const MartingaleSchedule& s) {
  std::vector<std::int64_t> d{std::llround(s.startDensity * static_cast<double>(kQ))};
  for (int k = 1; k <= s.levels; ++k) {
    const std::int64_t eh = eps_quanta(s, k);
    const std::int64_t m = std::int64_t{1} << (k - 1);
    const std::int64_t w = 2 * m;
    std::vector<std::int64_t> next(static_cast<std::size_t>(w * w));
    auto at = [&](std::int64_t x, std::int64_t y) {
      x = std::clamp<std::int64_t>(x, 0, m - 1);
      y = std::clamp<std::int64_t>(y, 0, m - 1);
      return static_cast<double>(d[x + y * m]);
    };
    for (std::int64_t y = 0; y < m; ++y) {
      for (std::int64_t x = 0; x < m; ++x) {
        const std::int64_t dv = d[x + y * m];
        const double gx = (at(x + 1, y) - at(x - 1, y)) / 8.0;
        const double gy = (at(x, y + 1) - at(x, y - 1)) / 8.0;
        CounterRng rng(s.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(x + y * m));
        const auto& pat = kPatterns[rng.below(kPatterns.size())];
        std::array<double, 4> e{};
        double peak = 0.0;
        for (int c = 0; c < 4; ++c) {
          const double sx = (c & 1) ? 1.0 : -1.0;
          const double sy = (c & 2) ? 1.0 : -1.0;
          e[c] = sx * gx + sy * gy + 0.5 * static_cast<double>(eh) * pat[c];
          peak = std::max(peak, std::abs(e[c]));
        }
        const double bound = static_cast<double>(std::min({eh, dv, kQ - dv}));
        if (peak > bound) {
          const double scale = bound / peak;
          for (double& v : e) v = std::clamp(v * scale, -bound, bound);
        }
        std::array<std::int64_t, 4> q{};
        quantize_zero_sum(e, q);
        for (int c = 0; c < 4; ++c) {
          const std::int64_t cx = 2 * x + (c & 1);
          const std::int64_t cy = 2 * y + ((c >> 1) & 1);
          next[cx + cy * w] = dv + q[c];
        }
      }
    }
    d.swap(next);
  }
  return d;
}

}  // namespace

MartingaleSchedule make_schedule(const std::string& preset, int levels, std::uint64_t seed, double startDensity) {
  require(levels >= 0, "levels must be nonnegative");
  require(startDensity > 0.0 && startDensity < 1.0, "startDensity must lie in (0,1)");
  MartingaleSchedule s;
  s.levels = levels;
  s.seed = seed;
  s.startDensity = startDensity;
  s.preset = preset;
  s.eps.resize(static_cast<std::size_t>(levels));
  for (int k = 1; k <= levels; ++k) {
    double e;
    if (preset == "harmonic") e = std::min(0.4, 0.3 / k);
    else if (preset == "sqrt") e = std::min(0.4, 0.8 / std::sqrt(static_cast<double>(k)));
    else if (preset == "zero") e = 0.0;
    else throw Error(ErrorKind::InvalidArgument, "unknown schedule preset: " + preset);
    s.eps[k - 1] = e;
  }
  return s;
}

MassGrid generate_martingale_set(const MartingaleSchedule& sched, int n) {
  require(n == 1 || n == 2, "dimension must be 1 or 2");
  require(sched.levels >= 0 && sched.levels <= (n == 1 ? 20 : 13),
          "resolution too large: K <= 20 for n=1, K <= 13 for n=2");
  require(sched.startDensity > 0.0 && sched.startDensity < 1.0, "startDensity must lie in (0,1)");
  for (std::size_t k = 1; k < sched.eps.size(); ++k)
    require(sched.eps[k] <= sched.eps[k - 1], "increment schedule must be non-increasing");
  const auto d = n == 1 ? cascade1(sched) : cascade2(sched);
  std::vector<double> cells(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) cells[i] = static_cast<double>(d[i]) * kQuantum;
  return MassGrid(n, sched.levels, std::move(cells));
}

double undecided_mass(const MassGrid& g) {
  std::size_t count = 0;
  for (double m : g.cells())
    if (m > 0.25 && m < 0.75) ++count;
  return static_cast<double>(count) * g.cell_volume();
}

double quantize(double m) { return std::round(m / kQuantum) * kQuantum; }

MassGrid fixture(const std::string& name, int n, int K, double param) {
  require(n == 1 || n == 2, "dimension must be 1 or 2");
  require(K >= 0 && n * K <= 32, "resolution out of range");
  const std::int64_t side = std::int64_t{1} << K;
  const std::size_t count = static_cast<std::size_t>(std::int64_t{1} << (n * K));
  std::vector<double> cells(count, 0.0);
  if (name == "empty") {
  } else if (name == "full") {
    std::fill(cells.begin(), cells.end(), 1.0);
  } else if (name == "constant") {
    require(param >= 0.0 && param <= 1.0, "constant density must lie in [0,1]");
    std::fill(cells.begin(), cells.end(), quantize(param));
  } else if (name == "halfspace") {
    require(param >= 0.0 && param <= 1.0, "halfspace offset must lie in [0,1]");
    for (std::size_t c = 0; c < count; ++c) {
      const auto i = static_cast<std::int64_t>(c) % side;
      cells[c] = quantize(std::clamp(param * static_cast<double>(side) - static_cast<double>(i), 0.0, 1.0));
    }
  } else if (name == "checkerboard") {
    const int m = static_cast<int>(param);
    require(param == m && m >= 0 && m <= K, "checkerboard block level must be an integer in [0, K]");
    for (std::size_t c = 0; c < count; ++c) {
      const auto i = static_cast<std::int64_t>(c) % side;
      const auto j = static_cast<std::int64_t>(c) / side;
      const std::int64_t parity = (i >> (K - m)) + (n == 2 ? (j >> (K - m)) : 0);
      cells[c] = parity % 2 == 0 ? 1.0 : 0.0;
    }
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown fixture: " + name);
  }
  return MassGrid(n, K, std::move(cells));
}

}  // namespace smoothset
