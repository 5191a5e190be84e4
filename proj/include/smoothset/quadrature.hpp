#pragma once

#include <cstdint>

#include "smoothset/dyadic.hpp"
#include "smoothset/smooth_map.hpp"

namespace smoothset {

struct QuadratureResult {
  double mass = 0.0;     // |A n phi(Q)|
  double volume = 0.0;   // |phi(Q)| as the integral of |J phi| over Q
  double density = 0.0;  // mass / volume
  double stderr_ = 0.0;  // standard error of density
  std::size_t samples = 0;
  std::size_t dropped = 0;  // samples outside [0,1]^n (clipping mode only)
};

inline constexpr int kDefaultSamples = 4096;

/// Density of A on phi(Q) by stratified sampling of Q with |J phi| weights.
/// Strata are a g x g grid (g = floor(sqrt N)) or N intervals in 1-D, one
/// jittered point each; the jitter stream is keyed by `key`.  Throws
/// RegionEscapesDomain if any mapped corner, edge point or sample leaves
/// [0,1]^n.  With `clip` set, samples landing outside are dropped instead
/// and the result describes phi(Q) n [0,1]^n.
QuadratureResult region_quadrature(const MassGrid& grid, const SmoothMap& phi, const AxisBox& q,
                                   int samples = kDefaultSamples, std::uint64_t key = 0, bool clip = false);

/// Same estimator for an affine image T(Q).
QuadratureResult affine_quadrature(const MassGrid& grid, const AffineMap& t, const AxisBox& q,
                                   int samples = kDefaultSamples, std::uint64_t key = 0);

/// True when phi(Q) stays inside [0,1]^n, judged on the boundary of Q
/// sampled at `perEdge` points per edge.
bool image_inside_unit(const SmoothMap& phi, const AxisBox& q, int perEdge = 16);

/// Stable key for a cube at a scale, used to seed quadrature streams.
std::uint64_t cube_key(const AxisBox& q, std::uint64_t salt = 0);

}  // namespace smoothset
