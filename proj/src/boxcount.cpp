#include "smoothset/boxcount.hpp"

#include <cmath>
#include <sstream>

#include "smoothset/error.hpp"

namespace smoothset {

BoxCountFit fit_counts(const std::vector<int>& scales, const std::vector<std::uint64_t>& counts) {
  require(scales.size() == counts.size(), "scales and counts differ in length");
  require(!scales.empty(), "empty window");
  BoxCountFit f;
  f.scales = scales;
  f.counts = counts;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (counts[i] > 0) {
      f.fitScales.push_back(scales[i]);
      xs.push_back(scales[i]);
      ys.push_back(std::log2(static_cast<double>(counts[i])));
    }
  if (xs.empty()) {
    f.flag = "empty target";
    return f;
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (xs.size() < 2 || sxx == 0.0) {
    f.flag = "degenerate";
    f.intercept = my;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.rsq = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

std::vector<int> default_window(int K) {
  std::vector<int> w;
  for (int j = 2; j <= K - 2; ++j) w.push_back(j);
  return w;
}

std::string boxcount_csv(const BoxCountFit& fit) {
  std::ostringstream os;
  os.precision(17);
  os << "j,count,logCount\n";
  for (std::size_t i = 0; i < fit.scales.size(); ++i) {
    os << fit.scales[i] << ',' << fit.counts[i] << ',';
    if (fit.counts[i] > 0)
      os << std::log2(static_cast<double>(fit.counts[i]));
    else
      os << "-inf";
    os << '\n';
  }
  return os.str();
}

}  // namespace smoothset
