#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smoothset/dyadic.hpp"
#include "smoothset/modulus.hpp"

namespace smoothset {

struct CubeDensity {
  DyadicCube cube;
  double density = 0.0;
};

/// Maximal dyadic subcubes of `parent` whose density first moves at least
/// eps away from D(parent).  Resolution cells never stopped are undecided.
struct StoppedFamily {
  DyadicCube parent;
  double parentDensity = 0.0;
  double eps = 0.0;
  std::vector<CubeDensity> plus;   // D - D(parent) >= eps
  std::vector<CubeDensity> minus;  // D(parent) - D >= eps
  std::size_t undecidedCells = 0;
  double undecidedMass = 0.0;      // volume of the undecided cells
  double undecidedMoment = 0.0;    // sum over them of (D(cell) - D(parent)) |cell|
  std::size_t visited = 0;

  double plus_volume() const;
  double minus_volume() const;
  /// sum over members of (D - D(parent)) |Q| plus the undecided moment.
  double partition_residual() const;
  /// sum of member volumes plus undecided volume minus |parent|.
  double volume_residual() const;
};

/// Breadth-first stopping descent.  Requires eps < min(D, 1 - D) and, when
/// `omegaAtParent` is given, n * omega < eps; violations throw
/// EpsilonOutsideWindow.  The parent must sit above the grid resolution.
StoppedFamily stop_family(const MassGrid& grid, const DyadicCube& parent, double eps,
                          std::optional<double> omegaAtParent = std::nullopt);

/// Same descent without the admissibility checks; any eps > 0 and any
/// parent level are accepted.
StoppedFamily stop_family_unchecked(const MassGrid& grid, const DyadicCube& parent, double eps);

/// No member has a member as strict ancestor and members are disjoint.
bool is_maximal(const StoppedFamily& fam);

struct Lemma2Report {
  double omega = 0.0;  // envelope at the parent sidelength
  double volumeBound = 0.0;  // 2^(-eps / omega) |parent|
  double largestMember = 0.0;
  bool partA = true;
  double threshold = 0.0;  // |parent| / 4 - undecided
  double plusVolume = 0.0;
  double minusVolume = 0.0;
  double plusMargin = 0.0;
  double minusMargin = 0.0;
  bool partB = true;
  bool vacuous = false;  // threshold <= 0: nothing to check at this resolution
  std::string note;
};

Lemma2Report verify_lemma2(const StoppedFamily& fam, const ModulusProfile& omega);

struct ScheduleParams {
  double alpha = 0.5;
  int k0 = -1;                // negative: smallest level whose envelope is below min(alpha,1-alpha)/20
  std::vector<double> c;      // c_1, c_2, ...; empty means 2n + k
  int maxGen = 4;
};

struct GenerationStats {
  int generation = 0;        // transition G(s) -> G(s+1)
  double eps = 0.0;          // eps_s
  double omega = 0.0;        // omega(2^{-s-k0})
  double c = 0.0;            // c_s
  std::size_t parents = 0;
  std::size_t stopped = 0;   // |R(Q)| summed over Q
  std::size_t members = 0;   // |G(s+1)|
  double P = 0.0;            // max |Q_j| / |Q|
  double Craw = 0.0;         // min over Q of sum |Q_j| / |Q|
  double Cadjusted = 0.0;    // min over Q of (sum |Q_j| + undecided(Q)) / |Q|
  double undecided = 0.0;    // total undecided volume / total parent volume
  double dimBound = 0.0;     // n(1 - log_P C) with raw constants, NaN when 0 < P < C fails
  double dimBoundAdjusted = 0.0;
  std::size_t sandwichChecks = 0;
  std::size_t sandwichViolations = 0;   // |D - alpha| > 6 eps_s on cubes between Q_j and Q
  std::size_t stopVolumeViolations = 0; // |R| > 2^{-c_s} |Q|
  std::size_t memberVolumeViolations = 0; // |Q_j| > 2^{-c_s} |Q|
  std::size_t retainedViolations = 0;   // sum |Q_j| < |Q|/4 - undecided(Q)
  std::size_t postconditionViolations = 0; // |D(Q_j) - alpha| >= eps_{s+1}/2
  std::size_t windowViolations = 0;     // eps outside (n omega, min(D, 1-D)) for a descent
  std::size_t sizeViolations = 0;       // l(Q_j) > 2^{-s-1-k0}
  std::size_t nestingViolations = 0;
};

struct Scaffold {
  int dim = 1;
  double alpha = 0.5;
  int k0 = 0;
  bool k0ConditionMet = false;   // omega(2^-k0) < min(alpha,1-alpha)/20
  bool epsConditionMet = false;  // every eps_k < min(alpha,1-alpha)/10
  std::vector<double> c;
  std::vector<double> eps;       // eps_1 ..
  std::vector<double> omega;     // omega(2^{-k-k0}) per k
  CubeDensity seed;
  std::vector<std::vector<CubeDensity>> generations;  // G(1), G(2), ...
  std::vector<GenerationStats> stats;                 // one per built transition
  std::vector<double> perGenP, perGenC, perGenCAdjusted, dimBound;
  double undecided = 0.0;  // undecided fraction of the last transition
  bool truncated = false;
  std::string flag;  // "", "no oscillation", "resolution exhausted"

  std::size_t total_violations() const;
};

/// Runs the generation recursion with eps_k = c_k * omega(2^{-k-k0}) taken
/// from the dyadic envelope `omega`.  Throws TrivialSet when no seed cube
/// exists.
Scaffold build_generations(const MassGrid& grid, const ScheduleParams& p, const ModulusProfile& omega);
Scaffold build_generations(const MassGrid& grid, const ScheduleParams& p);

/// n(1 - log_P C); requires 0 < P < C < 1.
double lemma1_bound(double P, double C, int n);

struct ESetEstimate {
  double alpha = 0.5;
  double tau = 0.0;
  int settleLevel = 0;
  std::vector<std::size_t> members;  // cell indices, first coordinate fastest
  double volume = 0.0;
  std::vector<std::uint64_t> counts;  // level-j cubes holding a member, j = 0..K
};

/// Cells x with D(Q_k(x)) in [alpha - tau, alpha + tau] for every k in [L, K].
ESetEstimate estimate_eset(const MassGrid& grid, double alpha, double tau, int settleLevel);

struct BridgeRow {
  double h = 0.0;
  int k = 0;              // 2^-k <= h < 2^{-k+1}
  double gap = 0.0;       // |D(Q(x,h)) - D(Q_k(x))|
  double cnt = 0.0;       // c(n, h 2^k)
  double omega = 0.0;     // envelope at sidelength 2^{-k+1}
  double bound = 0.0;     // (3n^2 + c) omega
  bool pass = true;
  bool clipped = false;   // h 2^k Q_k(x) left the unit cube
};

/// `omega` should be a lattice profile: the cubes compared are not dyadic.
std::vector<BridgeRow> nondyadic_bridge_check(const MassGrid& grid, const Point& x, const std::vector<double>& scales,
                                              const ModulusProfile& omega);

/// {generations, perGenP, perGenC, perGenCAdjusted, dimBound, undecided, ...}
std::string scaffold_json(const Scaffold& s);

}  // namespace smoothset
