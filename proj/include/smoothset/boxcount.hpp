#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smoothset {

/// log2 N(2^-j) against j, fitted by least squares over positive counts.
struct BoxCountFit {
  std::vector<int> scales;
  std::vector<std::uint64_t> counts;
  std::vector<int> fitScales;  // scales that entered the fit
  double slope = 0.0;
  double intercept = 0.0;
  double rsq = 0.0;
  std::string flag;  // "", "empty target", "degenerate"
};

BoxCountFit fit_counts(const std::vector<int>& scales, const std::vector<std::uint64_t>& counts);

/// Levels 2..K-2: the two coarsest and two finest levels are left out.
std::vector<int> default_window(int K);

/// j,count,logCount with logCount = log2(count), "-inf" for empty levels.
std::string boxcount_csv(const BoxCountFit& fit);

}  // namespace smoothset
