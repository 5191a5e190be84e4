#include "smoothset/smooth_map.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "smoothset/rng.hpp"

namespace smoothset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix2 rot(double a) {
  Matrix2 r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

double op_norm(const Matrix2& m) {
  const double f = m.squaredNorm();
  const double d = m.determinant();
  return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * d * d))));
}

Point apply(const MapStep& s, Point x, int dim) {
  switch (s.kind) {
    case MapStep::Kind::Identity: return x;
    case MapStep::Kind::Rotation: return rot(s.angle) * (x - s.center) + s.center;
    case MapStep::Kind::Dilation:
      x[s.axis] = s.center[s.axis] + s.lambda * (x[s.axis] - s.center[s.axis]);
      return x;
    case MapStep::Kind::Shear:
      x[0] += s.amplitude * std::sin(kTwoPi * s.frequency * x[1]);
      return x;
    case MapStep::Kind::Swap: return Point(x[1], x[0]);
    case MapStep::Kind::Warp:
      x[s.axis] += s.amplitude * std::sin(kTwoPi * s.frequency * x[s.axis]) / (kTwoPi * s.frequency);
      return x;
    case MapStep::Kind::Affine: {
      Point y = s.A * x + s.b;
      if (dim == 1) y[1] = 0.0;
      return y;
    }
  }
  return x;
}

Point unapply(const MapStep& s, Point y, int dim) {
  switch (s.kind) {
    case MapStep::Kind::Identity: return y;
    case MapStep::Kind::Rotation: return rot(-s.angle) * (y - s.center) + s.center;
    case MapStep::Kind::Dilation:
      y[s.axis] = s.center[s.axis] + (y[s.axis] - s.center[s.axis]) / s.lambda;
      return y;
    case MapStep::Kind::Shear:
      y[0] -= s.amplitude * std::sin(kTwoPi * s.frequency * y[1]);
      return y;
    case MapStep::Kind::Swap: return Point(y[1], y[0]);
    case MapStep::Kind::Warp: {
      // strictly increasing in x, so Newton from x = y converges
      const double w = kTwoPi * s.frequency;
      const double target = y[s.axis];
      double x = target;
      for (int it = 0; it < 100; ++it) {
        const double g = x + s.amplitude * std::sin(w * x) / w - target;
        const double dg = 1.0 + s.amplitude * std::cos(w * x);
        const double step = g / dg;
        x -= step;
        if (std::abs(step) < 1e-16) break;
      }
      y[s.axis] = x;
      return y;
    }
    case MapStep::Kind::Affine: {
      if (dim == 1) return Point((y[0] - s.b[0]) / s.A(0, 0), 0.0);
      return s.A.inverse() * (y - s.b);
    }
  }
  return y;
}

Matrix2 step_jacobian(const MapStep& s, const Point& x, int dim) {
  Matrix2 j = Matrix2::Identity();
  switch (s.kind) {
    case MapStep::Kind::Identity: break;
    case MapStep::Kind::Rotation: j = rot(s.angle); break;
    case MapStep::Kind::Dilation: j(s.axis, s.axis) = s.lambda; break;
    case MapStep::Kind::Shear: j(0, 1) = s.amplitude * kTwoPi * s.frequency * std::cos(kTwoPi * s.frequency * x[1]); break;
    case MapStep::Kind::Swap: j << 0, 1, 1, 0; break;
    case MapStep::Kind::Warp: j(s.axis, s.axis) = 1.0 + s.amplitude * std::cos(kTwoPi * s.frequency * x[s.axis]); break;
    case MapStep::Kind::Affine: j = s.A; break;
  }
  if (dim == 1) {
    j(0, 1) = j(1, 0) = 0.0;
    j(1, 1) = 1.0;
  }
  return j;
}

// (sup ||J||, sup ||J^-1||, Lipschitz constant of J) for one step.
struct StepBounds {
  double fwd, inv, lip;
};

StepBounds bounds(const MapStep& s) {
  switch (s.kind) {
    case MapStep::Kind::Identity:
    case MapStep::Kind::Rotation:
    case MapStep::Kind::Swap: return {1.0, 1.0, 0.0};
    case MapStep::Kind::Dilation: return {std::max(1.0, s.lambda), std::max(1.0, 1.0 / s.lambda), 0.0};
    case MapStep::Kind::Shear: {
      const double a = std::abs(s.amplitude * kTwoPi * s.frequency);
      const double m = 0.5 * (a + std::sqrt(a * a + 4.0));
      return {m, m, a * kTwoPi * std::abs(s.frequency)};
    }
    case MapStep::Kind::Warp: {
      const double a = std::abs(s.amplitude);
      return {1.0 + a, 1.0 / (1.0 - a), a * kTwoPi * std::abs(s.frequency)};
    }
    case MapStep::Kind::Affine: return {op_norm(s.A), op_norm(s.A.inverse()), 0.0};
  }
  return {1.0, 1.0, 0.0};
}

void validate(const MapStep& s, int dim) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  switch (s.kind) {
    case MapStep::Kind::Rotation:
    case MapStep::Kind::Shear:
    case MapStep::Kind::Swap:
      require(dim == 2, "rotation, shear and swap need n = 2", ErrorKind::MapRejected);
      break;
    case MapStep::Kind::Dilation:
      require(s.lambda > 0.0, "dilation factor must be positive", ErrorKind::MapRejected);
      require(s.axis >= 0 && s.axis < dim, "dilation axis out of range", ErrorKind::MapRejected);
      break;
    case MapStep::Kind::Warp:
      require(std::abs(s.amplitude) < 1.0 && s.frequency > 0.0, "warp needs |amplitude| < 1, frequency > 0",
              ErrorKind::MapRejected);
      require(s.axis >= 0 && s.axis < dim, "warp axis out of range", ErrorKind::MapRejected);
      break;
    case MapStep::Kind::Affine: {
      const double det = dim == 1 ? s.A(0, 0) : s.A.determinant();
      require(std::abs(det) > 1e-12, "affine map is singular", ErrorKind::MapRejected);
      break;
    }
    default: break;
  }
}

}  // namespace

SmoothMap::SmoothMap(int dim, std::vector<MapStep> steps, std::string name)
    : dim_(dim), steps_(std::move(steps)), name_(std::move(name)) {
  for (const auto& s : steps_) validate(s, dim_);
}

SmoothMap SmoothMap::identity(int dim) { return SmoothMap(dim, {MapStep{}}, "identity"); }

SmoothMap SmoothMap::rotation(double angle, const Point& center) {
  MapStep s;
  s.kind = MapStep::Kind::Rotation;
  s.angle = angle;
  s.center = center;
  return SmoothMap(2, {s}, "rotation");
}

SmoothMap SmoothMap::dilation(int dim, double lambda, int axis, const Point& center) {
  MapStep s;
  s.kind = MapStep::Kind::Dilation;
  s.lambda = lambda;
  s.axis = axis;
  s.center = center;
  return SmoothMap(dim, {s}, "dilation");
}

SmoothMap SmoothMap::shear(double amplitude, double frequency) {
  MapStep s;
  s.kind = MapStep::Kind::Shear;
  s.amplitude = amplitude;
  s.frequency = frequency;
  return SmoothMap(2, {s}, "shear");
}

SmoothMap SmoothMap::swap() {
  MapStep s;
  s.kind = MapStep::Kind::Swap;
  return SmoothMap(2, {s}, "swap");
}

SmoothMap SmoothMap::warp(int dim, double amplitude, double frequency, int axis) {
  MapStep s;
  s.kind = MapStep::Kind::Warp;
  s.amplitude = amplitude;
  s.frequency = frequency;
  s.axis = axis;
  return SmoothMap(dim, {s}, "warp");
}

SmoothMap SmoothMap::affine(const Matrix2& A, const Point& b) {
  MapStep s;
  s.kind = MapStep::Kind::Affine;
  s.A = A;
  s.b = b;
  return SmoothMap(2, {s}, "affine");
}

SmoothMap SmoothMap::then(const SmoothMap& outer) const {
  require(outer.dim_ == dim_, "cannot compose maps of different dimension");
  auto steps = steps_;
  steps.insert(steps.end(), outer.steps_.begin(), outer.steps_.end());
  return SmoothMap(dim_, std::move(steps), outer.name_ + "*" + name_);
}

Point SmoothMap::forward(const Point& x) const {
  Point y = x;
  for (const auto& s : steps_) y = apply(s, y, dim_);
  return y;
}

Point SmoothMap::inverse(const Point& y) const {
  Point x = y;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) x = unapply(*it, x, dim_);
  return x;
}

Matrix2 SmoothMap::jacobian(const Point& x) const {
  Matrix2 j = Matrix2::Identity();
  Point p = x;
  for (const auto& s : steps_) {
    j = step_jacobian(s, p, dim_) * j;
    p = apply(s, p, dim_);
  }
  return j;
}

double SmoothMap::jacobian_det(const Point& x) const {
  const Matrix2 j = jacobian(x);
  return dim_ == 1 ? j(0, 0) : j.determinant();
}

double SmoothMap::lipschitz_M() const {
  double fwd = 1.0, inv = 1.0;
  for (const auto& s : steps_) {
    const auto b = bounds(s);
    fwd *= b.fwd;
    inv *= b.inv;
  }
  return std::max(fwd, inv);
}

// For g after f: |D(g f)(x) - D(g f)(y)| <= (Lg Mf^2 + Mg Lf) |x - y|.
double SmoothMap::jacobian_lipschitz() const {
  double L = 0.0, M = 1.0;
  for (const auto& s : steps_) {
    const auto b = bounds(s);
    L = b.lip * M * M + b.fwd * L;
    M *= b.fwd;
  }
  return L;
}

bool SmoothMap::constant_jacobian() const {
  for (const auto& s : steps_)
    if (s.kind == MapStep::Kind::Warp) return false;
  return true;
}

AffineMap SmoothMap::tangent_at(const Point& z) const {
  AffineMap t;
  t.A = jacobian(z);
  t.b = forward(z) - t.A * z;
  return t;
}

MapVerification SmoothMap::verify(std::size_t pairs, std::uint64_t seed, double jacobianLipschitz) const {
  MapVerification v;
  v.declaredM = lipschitz_M();
  const double L = jacobianLipschitz > 0.0 ? jacobianLipschitz : jacobian_lipschitz();
  v.minRatio = std::numeric_limits<double>::infinity();
  v.maxRatio = 0.0;
  v.minAbsJacobian = std::numeric_limits<double>::infinity();
  v.maxAbsJacobian = 0.0;
  CounterRng rng(seed, 0xB11, 0);
  auto draw = [&] {
    Point p = Point::Zero();
    for (int i = 0; i < dim_; ++i) p[i] = rng.uniform();
    return p;
  };
  const double delta = std::ldexp(1.0, -8);
  for (std::size_t k = 0; k < pairs; ++k) {
    const Point x = draw();
    const Point y = draw();
    const double d = (x - y).norm();
    if (d > 0.0) {
      const double r = (forward(x) - forward(y)).norm() / d;
      v.minRatio = std::min(v.minRatio, r);
      v.maxRatio = std::max(v.maxRatio, r);
    }
    const double jd = std::abs(jacobian_det(x));
    v.minAbsJacobian = std::min(v.minAbsJacobian, jd);
    v.maxAbsJacobian = std::max(v.maxAbsJacobian, jd);

    Point u = Point::Zero();
    for (int i = 0; i < dim_; ++i) u[i] = 2.0 * rng.uniform() - 1.0;
    const Point z = x + delta * u / std::max(1.0, u.norm());
    const double dz = (z - x).norm();
    const double gap = op_norm(jacobian(z) - jacobian(x));
    v.jacobianModulus = std::max(v.jacobianModulus, gap);
    if (gap > L * dz + 1e-12 && v.ok) {
      v.ok = false;
      v.reason = "Jacobian varies faster than its declared modulus";
    }
  }
  v.pairs = pairs;
  const double tol = 1e-9;
  if (v.maxRatio > v.declaredM * (1 + tol) || v.minRatio < (1 - tol) / v.declaredM) {
    v.ok = false;
    v.reason = "sampled distortion exceeds declared bilipschitz constant";
  }
  if (v.minAbsJacobian < (1 - tol) / std::pow(v.declaredM, dim_) || v.maxAbsJacobian > (1 + tol) * std::pow(v.declaredM, dim_)) {
    v.ok = false;
    v.reason = "Jacobian determinant outside declared bounds";
  }
  return v;
}

}  // namespace smoothset
