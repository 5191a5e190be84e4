#include "smoothset/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "smoothset/parallel.hpp"

namespace smoothset {

BoxCountFit box_count(const MassGrid& grid, double lo, double hi, std::vector<int> scales, int workers) {
  require(lo >= 0.0 && lo < hi && hi <= 1.0, "band must satisfy 0 <= lo < hi <= 1");
  const int n = grid.dim();
  const int K = grid.level();
  if (scales.empty()) scales = default_window(K);
  require(!scales.empty(), "empty window");
  for (int j : scales) require(j >= 0 && j <= K, "scale beyond resolution");
  std::vector<std::uint64_t> counts(scales.size(), 0);
  parallel_chunks(
      scales.size(), 1,
      [&](std::size_t i, std::size_t, std::size_t) {
        const int j = scales[i];
        const std::int64_t side = std::int64_t{1} << j;
        std::uint64_t c = 0;
        for (std::int64_t y = 0; y < (n == 2 ? side : 1); ++y)
          for (std::int64_t x = 0; x < side; ++x) {
            const double d = grid.cube_density(DyadicCube{n, j, Index2(x, y)});
            if (d >= lo && d <= hi) ++c;
          }
        counts[i] = c;
      },
      workers);
  return fit_counts(scales, counts);
}

BoxCountFit mask_count(int dim, int K, const std::vector<std::size_t>& cells, std::vector<int> scales) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  if (scales.empty()) scales = default_window(K);
  require(!scales.empty(), "empty window");
  const std::int64_t side = std::int64_t{1} << K;
  std::vector<std::uint64_t> counts;
  for (int j : scales) {
    require(j >= 0 && j <= K, "scale beyond resolution");
    const int sh = K - j;
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t c : cells) {
      const auto x = static_cast<std::uint64_t>(static_cast<std::int64_t>(c) % side) >> sh;
      const auto y = dim == 2 ? static_cast<std::uint64_t>(static_cast<std::int64_t>(c) / side) >> sh : 0;
      seen.insert(x | (y << 32));
    }
    counts.push_back(seen.size());
  }
  return fit_counts(scales, counts);
}

BoxCountFit eset_box_dim(const ESetEstimate& e, std::vector<int> scales) {
  const int K = static_cast<int>(e.counts.size()) - 1;
  if (scales.empty()) scales = default_window(K);
  require(!scales.empty(), "empty window");
  std::vector<std::uint64_t> counts;
  for (int j : scales) {
    require(j >= 0 && j <= K, "scale beyond resolution");
    counts.push_back(e.counts[j]);
  }
  return fit_counts(scales, counts);
}

ScaffoldDimension scaffold_box_dim(const Scaffold& s, std::vector<int> scales) {
  require(!s.generations.empty(), "scaffold has no generations");
  const int n = s.dim;
  const auto& last = s.generations.back();
  int deepest = 0;
  for (const auto& m : last) deepest = std::max(deepest, m.cube.level);
  if (scales.empty())
    for (int j = s.seed.cube.level; j <= deepest; ++j) scales.push_back(j);
  require(!scales.empty(), "empty window");
  std::vector<std::uint64_t> counts;
  for (int j : scales) {
    require(j >= 0 && j <= 30, "scale out of range");
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t solid = 0;
    for (const auto& m : last) {
      const int sh = j - m.cube.level;
      if (sh >= 0) {
        solid += std::uint64_t{1} << (n * sh);
      } else {
        const auto x = static_cast<std::uint64_t>(m.cube.index[0] >> -sh);
        const auto y = static_cast<std::uint64_t>(m.cube.index[1] >> -sh);
        seen.insert(x | (y << 32));
      }
    }
    counts.push_back(solid + seen.size());
  }
  ScaffoldDimension d;
  d.fit = fit_counts(scales, counts);
  d.bound = std::numeric_limits<double>::quiet_NaN();
  if (!s.perGenP.empty()) {
    d.P = *std::max_element(s.perGenP.begin(), s.perGenP.end());
    d.C = *std::min_element(s.perGenC.begin(), s.perGenC.end());
    if (d.P > 0.0 && d.P < d.C && d.C < 1.0) d.bound = lemma1_bound(d.P, d.C, n);
  }
  d.comparable = s.generations.size() >= 3 && std::isfinite(d.bound);
  if (s.generations.size() < 3) d.fit.flag = "degenerate";
  return d;
}

}  // namespace smoothset
