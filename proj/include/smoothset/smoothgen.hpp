#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothset/dyadic.hpp"

namespace smoothset {

/// Per-level increment bounds for the density cascade.  eps[k-1] bounds
/// |D(child) - D(parent)| for children at level k.
struct MartingaleSchedule {
  std::vector<double> eps;
  int levels = 0;
  std::uint64_t seed = 0;
  double startDensity = 0.5;
  std::string preset = "custom";
};

/// Named laws: "harmonic" min(0.4, 0.3/k) (default), "sqrt" min(0.4, 0.8/sqrt k),
/// "zero".
MartingaleSchedule make_schedule(const std::string& preset, int levels, std::uint64_t seed,
                                 double startDensity = 0.5);

/// Densities are kept as integer multiples of this quantum during generation.
inline constexpr double kQuantum = 0x1.0p-26;

/// Zero-sum random cascade with a mean-preserving interpolating drift.
/// Children of a cube with density d get d + e_c where sum_c e_c = 0 and
/// |e_c| <= min(eps_k, d, 1-d).
MassGrid generate_martingale_set(const MartingaleSchedule& sched, int n);

/// Volume of resolution cells with density strictly inside (0.25, 0.75).
double undecided_mass(const MassGrid& g);

/// Nearest multiple of kQuantum, so prefix sums stay exact.
double quantize(double m);

/// empty, full, halfspace(c), checkerboard(m), constant(d).  Fractional
/// masses are quantized.
MassGrid fixture(const std::string& name, int n, int K, double param = 0.0);

}  // namespace smoothset
