#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "smoothset/dyadic.hpp"
#include "smoothset/modulus.hpp"
#include "smoothset/quadrature.hpp"
#include "smoothset/smooth_map.hpp"

namespace smoothset {

// ---- singular value factorization -----------------------------------------

/// m = V * Sigma * W with V, W orthogonal and Sigma diagonal, descending.
template <class Scalar>
struct LinearMap2T {
  using Mat = Eigen::Matrix<Scalar, 2, 2>;
  Mat matrix, V, Sigma, W;
  Eigen::Matrix<Scalar, 2, 1> singularValues;
  Scalar opNorm = 0;
  bool invertible = false;
};

using LinearMap2 = LinearMap2T<double>;

template <class Scalar>
LinearMap2T<Scalar> svd2(const Eigen::Matrix<Scalar, 2, 2>& m) {
  Eigen::JacobiSVD<Eigen::Matrix<Scalar, 2, 2>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  LinearMap2T<Scalar> out;
  out.matrix = m;
  out.V = svd.matrixU();
  out.singularValues = svd.singularValues();
  out.Sigma = out.singularValues.asDiagonal();
  out.W = svd.matrixV().transpose();
  out.opNorm = out.singularValues(0);
  const Scalar tol = Eigen::NumTraits<Scalar>::epsilon() * 16 * (out.opNorm > Scalar(0) ? out.opNorm : Scalar(1));
  out.invertible = out.singularValues(1) > tol;
  if (!out.invertible) {
    out.singularValues(1) = 0;
    out.Sigma(1, 1) = 0;
  }
  return out;
}

// ---- rotation decomposition -------------------------------------------------

struct AxisSquare {
  Point corner = Point::Zero();
  double side = 0.0;
  double area() const { return side * side; }
};

/// Right triangle with legs parallel to the axes: right-angle vertex `r`,
/// signed legs `px` along x and `qy` along y.
struct RightTriangle {
  Point r = Point::Zero();
  double px = 0.0;
  double qy = 0.0;
  double area() const { return 0.5 * std::abs(px * qy); }
};

/// Decomposition of the unit-area square turned by alpha (centred at the
/// origin) into axis-parallel squares.  families[0] is the inscribed square,
/// families[k] the squares cut from the triangles left after level k-1.
struct RotDecomposition {
  double alpha = 0.0;
  double C = 0.0;  // 1 / (1 + sin 2 alpha)
  std::vector<std::vector<AxisSquare>> families;
  std::vector<double> familyArea;
  std::vector<RightTriangle> residual;
  double residualArea = 0.0;
  std::vector<double> residualByLevel;  // area left after each level
  /// Vertices of the turned square.
  std::vector<Point> outline;
};

RotDecomposition rot_decompose(double alpha, int depth);

/// Any planar rotation as quarter turns times rotations whose angles have
/// modulus in [pi/6, pi/4] (a negative angle is a reflected rotation).
struct RotationReduction {
  int quarterTurns = 0;
  std::vector<double> factors;
  Matrix2 product() const;
};

RotationReduction reduce_rotation(double theta);

// ---- rotation and dilation bounds ----------------------------------------

struct RotationBoundRow {
  int level = 0;
  std::size_t cubes = 0;
  double gap = 0.0;            // max |D(phi^-1 Q) - D(Q~)|
  double gapStderr = 0.0;
  double omega = 0.0;
  double impliedC1 = 0.0;      // gap / omega
  double seriesFactor = 0.0;   // (1-C)^2 C^{-1} sum k C^k
  double squareC1 = 0.0;       // max over squares R in F_k of |D(R) - D(Q~)| / (max(k,1) omega)
  double decompositionGap = 0.0;  // same gap from the square decomposition plus residual bound
  double translation = 0.0;    // max |D(Q~) - D(Q~')|
  double translationBound = 0.0;  // 3 n^3 omega
  bool pass = true;            // translation within its bound
};

struct RotationBoundReport {
  double alpha = 0.0;
  double C = 0.0;
  bool nonSmoothInput = false;  // omega close to 1 at every scale
  std::vector<RotationBoundRow> rows;
};

/// `omega` is a lattice profile covering `scales`.
RotationBoundReport verify_rotation_bound(const MassGrid& grid, double alpha, const std::vector<int>& scales,
                                          const ModulusProfile& omega, int samples = kDefaultSamples,
                                          std::size_t maxCubes = 256, int depth = 8);

struct Slab {
  int k = 0;  // 0 for unit slabs, otherwise the dyadic generation
  double lo = 0.0;
  double hi = 0.0;
};

/// [0, lambda) as unit slabs [j, j+1) followed by maximal dyadic intervals.
struct SlabDecomposition {
  double lambda = 1.0;
  std::vector<Slab> integerSlabs;
  std::vector<Slab> dyadicSlabs;
  double total_width() const;
};

SlabDecomposition slab_decompose(double lambda);

double dilation_coefficient(double lambda);  // lambda + 1 + 3/lambda, with lambda -> 1/lambda below 1
double remark1_coefficient(double lambda);   // 4 (lambda + 1/lambda)

struct DilationBoundRow {
  int level = 0;
  std::size_t boxes = 0;
  double gap = 0.0;
  double omega = 0.0;
  double bound = 0.0;
  double remarkBound = 0.0;
  double worstSlabRatio = 0.0;  // max |D(slab) - D(Q~)| over its per-slab bound
  double reconstruction = 0.0;  // max |D(box) - sum (width/lambda) D(slab)|
  bool pass = true;
  bool remarkPass = true;
};

struct DilationBoundReport {
  double lambda = 1.0;
  double coefficient = 0.0;
  double remarkCoefficient = 0.0;
  SlabDecomposition slabs;
  std::vector<DilationBoundRow> rows;
};

/// Stretched boxes of sidelength 2^-j by lambda along x1 (along x2 with
/// 1/lambda when lambda < 1), compared with the cube at their low end.
DilationBoundReport verify_dilation_bound(const MassGrid& grid, double lambda, const std::vector<int>& scales,
                                          const ModulusProfile& omega, int stride = 0);

// ---- centred-cube estimates ----------------------------------------------------

struct AnnulusDecomposition {
  double t = 1.0;
  int n = 1;
  std::vector<int> digits;     // t_1, t_2, ...
  std::vector<double> sides;   // l(Q_m) / l(Q), m = 0..
  std::vector<double> volumes; // |R_m| / |Q|, m = 0..
  double constant = 0.0;       // sum |R_m| / |tQ| (n(m+1)+1)
};

AnnulusDecomposition annulus_decompose(double t, int n);
double lemma3b_constant(double t, int n);

struct Lemma3aRow {
  int level = 0;
  std::size_t pairs = 0;
  double measured = 0.0;
  double bound = 0.0;      // 3 n^2 omega
  double shifted = 0.0;    // axis shifts only
  double shiftedBound = 0.0;  // 3 n omega
  double omega = 0.0;
  bool pass = true;
};

std::vector<Lemma3aRow> lemma3a_check(const MassGrid& grid, const std::vector<int>& scales,
                                      const ModulusProfile& omega, std::size_t pairsPerScale = 200000,
                                      std::uint64_t seed = 1);

struct Lemma3bRow {
  int level = 0;
  double t = 1.0;
  std::size_t cubes = 0;
  double measured = 0.0;
  double cnt = 0.0;
  double omega = 0.0;
  double bound = 0.0;
  bool pass = true;
};

/// Centred cubes on the 2^-(j+2) lattice whose t-dilate stays in [0,1]^n.
std::vector<Lemma3bRow> lemma3b_check(const MassGrid& grid, double t, const std::vector<int>& scales,
                                      const ModulusProfile& omega);

// ---- bilipschitz invariance ------------------------------------------------

struct Theorem3Row {
  int level = 0;
  std::size_t pairs = 0;
  std::size_t skipped = 0;  // pairs whose image leaves the unit cube
  double volumeGap = 0.0;   // max |(|phi Q| - |phi Q'|)| / |Q|
  double massGap = 0.0;     // max |(|A n phi Q| - |A n phi Q'|)| / |Q|
  double tangent = 0.0;     // max ||A n phi Q| - |A n T Q|| / |Q|
  double stderr_ = 0.0;     // largest mass standard error, relative to |Q|
};

std::vector<Theorem3Row> theorem3_checks(const MassGrid& grid, const SmoothMap& phi, const std::vector<int>& scales,
                                         int samples = kDefaultSamples, std::size_t maxPairs = 2048,
                                         int workers = 0);

struct PullbackResult {
  MassGrid grid;
  double maxStderr = 0.0;
  std::size_t clippedCells = 0;
};

/// Cell masses = density of A on phi(cell); parts of phi(cell) outside
/// [0,1]^n are dropped.
PullbackResult pullback_set(const MassGrid& grid, const SmoothMap& phi, int level, int samples = 256,
                            int workers = 0);

}  // namespace smoothset
