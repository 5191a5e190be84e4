#pragma once

#include <cstdint>
#include <vector>

#include "smoothset/boxcount.hpp"
#include "smoothset/dyadic.hpp"
#include "smoothset/scaffold.hpp"

namespace smoothset {

/// Level-j cubes whose density lies in [lo, hi].  Empty `scales` means
/// default_window(K).
BoxCountFit box_count(const MassGrid& grid, double lo, double hi, std::vector<int> scales = {}, int workers = 0);

/// Level-j cubes containing at least one marked resolution cell.
BoxCountFit mask_count(int dim, int K, const std::vector<std::size_t>& cells, std::vector<int> scales = {});

BoxCountFit eset_box_dim(const ESetEstimate& e, std::vector<int> scales = {});

struct ScaffoldDimension {
  BoxCountFit fit;
  double P = 0.0;      // max over generations
  double C = 0.0;      // min over generations
  double bound = 0.0;  // lemma1_bound(P, C, n), NaN when undefined
  bool comparable = false;  // at least three generations and a defined bound
};

/// Box counts of the union of the last generation at the generation levels
/// (seed level through the deepest member level).
ScaffoldDimension scaffold_box_dim(const Scaffold& s, std::vector<int> scales = {});

}  // namespace smoothset
