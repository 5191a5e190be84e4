#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "smoothset/dyadic.hpp"

namespace smoothset {

using Matrix2 = Eigen::Matrix2d;

/// One primitive of a SmoothMap.  Coordinates beyond dim are left alone.
struct MapStep {
  enum class Kind { Identity, Rotation, Dilation, Shear, Swap, Warp, Affine };
  Kind kind = Kind::Identity;
  double angle = 0.0;      // rotation
  double lambda = 1.0;     // dilation
  int axis = 0;            // dilation, warp
  double amplitude = 0.0;  // shear, warp
  double frequency = 1.0;  // shear, warp
  Point center = Point::Constant(0.5);
  Matrix2 A = Matrix2::Identity();  // affine
  Point b = Point::Zero();          // affine
};

struct AffineMap {
  Matrix2 A = Matrix2::Identity();
  Point b = Point::Zero();
  Point operator()(const Point& x) const { return A * x + b; }
};

struct MapVerification {
  bool ok = true;
  double declaredM = 1.0;
  double minRatio = 1.0;  // min ||phi(x)-phi(y)|| / ||x-y||
  double maxRatio = 1.0;
  double minAbsJacobian = 1.0;
  double maxAbsJacobian = 1.0;
  double jacobianModulus = 0.0;  // max |J(x)-J(y)| over close pairs
  std::size_t pairs = 0;
  std::string reason;
};

/// Bilipschitz map built from primitives.  Steps apply in order, so the
/// last step is outermost.
class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(int dim, std::vector<MapStep> steps, std::string name = "");

  static SmoothMap identity(int dim);
  static SmoothMap rotation(double angle, const Point& center = Point::Constant(0.5));
  static SmoothMap dilation(int dim, double lambda, int axis = 0, const Point& center = Point::Constant(0.5));
  /// (x + a sin(2 pi f y), y)
  static SmoothMap shear(double amplitude, double frequency = 1.0);
  static SmoothMap swap();
  /// x_axis + a sin(2 pi f x_axis) / (2 pi f), |a| < 1: a map whose Jacobian
  /// determinant is not constant.
  static SmoothMap warp(int dim, double amplitude, double frequency = 1.0, int axis = 0);
  static SmoothMap affine(const Matrix2& A, const Point& b);
  SmoothMap then(const SmoothMap& outer) const;

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<MapStep>& steps() const { return steps_; }

  Point forward(const Point& x) const;
  Point inverse(const Point& y) const;
  Matrix2 jacobian(const Point& x) const;
  double jacobian_det(const Point& x) const;
  /// Declared bilipschitz constant from the primitives.
  double lipschitz_M() const;
  /// Lipschitz constant of x -> Dphi(x) in operator norm.
  double jacobian_lipschitz() const;
  /// True when every step has constant Jacobian determinant.
  bool constant_jacobian() const;
  /// T(x) = phi(z) + Dphi(z)(x - z).
  AffineMap tangent_at(const Point& z) const;

  /// Samples pairs in [0,1]^n and checks the declared constant, the Jacobian
  /// bounds, and |J(x) - J(y)| <= L ||x-y|| for ||x-y|| <= 2^-8, where L is
  /// `jacobianLipschitz` or, when that is nonpositive, jacobian_lipschitz().
  MapVerification verify(std::size_t pairs = 10000, std::uint64_t seed = 1,
                         double jacobianLipschitz = 0.0) const;

 private:
  int dim_ = 2;
  std::vector<MapStep> steps_;
  std::string name_;
};

}  // namespace smoothset
