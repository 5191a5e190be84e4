#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothset/dyadic.hpp"
#include "smoothset/quadrature.hpp"

namespace smoothset {

enum class ModulusMode { Dyadic, Lattice, Rotated };

struct ModulusOptions {
  ModulusMode mode = ModulusMode::Dyadic;
  int stride = 0;  // lattice exponent S; 0 means min(K, j + 4)
  double angle = 0.0;
  int samples = kDefaultSamples;  // per rotated cube
  std::size_t maxPairs = 1024;    // rotated mode only
  int workers = 0;
};

/// A consecutive pair as evaluated.  In rotated mode both boxes are turned by
/// `angle` about `pivot` (the centre of `first`).
struct PairWitness {
  ConsecutivePair pair;
  bool rotated = false;
  double angle = 0.0;
  Point pivot = Point::Zero();
  double densityFirst = 0.0;
  double densitySecond = 0.0;
};

struct ModulusSample {
  int level = 0;
  double t = 1.0;
  double omega = 0.0;
  std::uint64_t pairCount = 0;
  int stride = 0;
  bool hasWitness = false;
  PairWitness witness;
  double envelope = 0.0;  // max of omega over this and all finer measured scales
  double stderr_ = 0.0;   // rotated mode: quadrature error of the witness gap
};

struct ModulusProfile {
  ModulusMode mode = ModulusMode::Dyadic;
  double angle = 0.0;
  int samples = kDefaultSamples;
  std::vector<ModulusSample> samplesByScale;  // decreasing t

  const ModulusSample* find(int level) const;
  double omega_at(int level) const;
  /// Envelope at `level`; coarser than every sample gives the global max,
  /// finer than every sample gives the finest envelope.
  double envelope_at(int level) const;
  std::string mode_label(const ModulusSample& s) const;
};

ModulusProfile estimate_modulus(const MassGrid& grid, std::vector<int> scales, const ModulusOptions& opt = {});

/// Dyadic profile over every level 0..K, the usual driver for the scaffold.
ModulusProfile dyadic_profile(const MassGrid& grid, int workers = 0);

/// Re-evaluates a witness: |D(first) - D(second)|.
double evaluate_witness(const MassGrid& grid, const PairWitness& w, int samples = kDefaultSamples);

struct StepCheck {
  int level = 0;
  double measuredMax = 0.0;
  double bound = 0.0;  // n * omega envelope at the parent sidelength
  bool pass = true;
};

/// max over level-j cubes and their children of |D(child) - D(parent)|.
StepCheck dyadic_step_check(const MassGrid& grid, int level, const ModulusProfile& omega);
StepCheck dyadic_step_check(const MassGrid& grid, int level);

struct GridComparisonRow {
  int level = 0;
  double dyadic = 0.0;
  double lattice = 0.0;
  std::vector<double> rotated;
  double latticeRatio = 0.0;  // lattice / dyadic (0 when both vanish)
  std::vector<double> rotatedRatio;
};

struct GridComparison {
  ModulusProfile dyadic;
  ModulusProfile lattice;
  std::vector<ModulusProfile> rotated;
  std::vector<GridComparisonRow> rows;
  double maxRatio = 0.0;  // over every ratio and scale; +inf if dyadic vanishes alone
  std::string classification;  // "consistent" or "inconsistent"
  std::string trend;           // "all vanish", "all decay", "none decay", "mixed"
};

GridComparison compare_grid_definitions(const MassGrid& grid, const std::vector<int>& scales, int stride,
                                        const std::vector<double>& angles, int samples = kDefaultSamples,
                                        std::size_t maxPairs = 1024, int workers = 0);

/// Rows "mode,j,t,omega,pairCount".
std::string modulus_csv(const ModulusProfile& p, bool header = true);

}  // namespace smoothset
