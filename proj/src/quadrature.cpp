#include "smoothset/quadrature.hpp"

#include <bit>
#include <cmath>

#include "smoothset/rng.hpp"

namespace smoothset {

namespace {

constexpr double kSlack = 1e-12;

bool inside(const Point& p, int dim) {
  for (int i = 0; i < dim; ++i)
    if (p[i] < -kSlack || p[i] > 1.0 + kSlack) return false;
  return true;
}

template <class Fwd, class Jac>
QuadratureResult stratified(const MassGrid& grid, const AxisBox& q, int samples, std::uint64_t key, bool clip,
                            Fwd&& fwd, Jac&& jac) {
  require(samples >= 64, "quadrature needs at least 64 samples");
  require(q.side > 0.0, "empty box", ErrorKind::EmptyBox);
  const int dim = grid.dim();
  const int g = dim == 1 ? samples : static_cast<int>(std::floor(std::sqrt(static_cast<double>(samples))));
  const std::size_t count = dim == 1 ? static_cast<std::size_t>(g) : static_cast<std::size_t>(g) * g;
  CounterRng rng(key, 0x51A7, static_cast<std::uint64_t>(samples));
  auto jitter = [&] { return static_cast<double>(rng.next() >> 32) * 0x1.0p-32; };

  std::vector<double> w(count, 0.0), f(count, 0.0);
  double sw = 0.0, swf = 0.0;
  std::size_t dropped = 0;
  const double cell = q.side / g;
  for (std::size_t k = 0; k < count; ++k) {
    Point u = Point::Zero();
    u[0] = q.corner[0] + cell * (static_cast<double>(k % g) + jitter());
    if (dim == 2) u[1] = q.corner[1] + cell * (static_cast<double>(k / g) + jitter());
    const Point y = fwd(u);
    if (!inside(y, dim)) {
      if (!clip) throw Error(ErrorKind::RegionEscapesDomain, "region escapes domain");
      ++dropped;
      continue;
    }
    w[k] = std::abs(jac(u));
    f[k] = grid.value_at(y);
    sw += w[k];
    swf += w[k] * f[k];
  }
  QuadratureResult r;
  r.samples = count;
  r.dropped = dropped;
  const double vol = q.volume();
  r.volume = sw / static_cast<double>(count) * vol;
  r.mass = swf / static_cast<double>(count) * vol;
  r.density = sw > 0.0 ? swf / sw : 0.0;
  const double kept = static_cast<double>(count - dropped);
  const double wbar = kept > 0.0 ? sw / kept : 0.0;
  double ss = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double e = w[k] * (f[k] - r.density);
    ss += e * e;
  }
  r.stderr_ = wbar > 0.0 && kept > 1.0 ? std::sqrt(ss / (kept * (kept - 1.0))) / wbar : 0.0;
  return r;
}

}  // namespace

QuadratureResult region_quadrature(const MassGrid& grid, const SmoothMap& phi, const AxisBox& q, int samples,
                                   std::uint64_t key, bool clip) {
  require(phi.dim() == grid.dim(), "map dimension does not match grid");
  if (!clip && !image_inside_unit(phi, q)) throw Error(ErrorKind::RegionEscapesDomain, "region escapes domain");
  return stratified(
      grid, q, samples, key, clip, [&](const Point& u) { return phi.forward(u); },
      [&](const Point& u) { return phi.jacobian_det(u); });
}

QuadratureResult affine_quadrature(const MassGrid& grid, const AffineMap& t, const AxisBox& q, int samples,
                                   std::uint64_t key) {
  const int dim = grid.dim();
  const double det = dim == 1 ? t.A(0, 0) : t.A.determinant();
  return stratified(
      grid, q, samples, key, false,
      [&](const Point& u) {
        Point y = t(u);
        if (dim == 1) y[1] = 0.0;
        return y;
      },
      [&](const Point&) { return det; });
}

bool image_inside_unit(const SmoothMap& phi, const AxisBox& q, int perEdge) {
  const int dim = phi.dim();
  if (dim == 1) {
    for (int k = 0; k <= perEdge; ++k) {
      Point u(q.corner[0] + q.side * k / perEdge, 0.0);
      if (!inside(phi.forward(u), 1)) return false;
    }
    return true;
  }
  for (int k = 0; k <= perEdge; ++k) {
    const double s = q.side * k / perEdge;
    const Point pts[4] = {
        q.corner + Point(s, 0.0), q.corner + Point(s, q.side),
        q.corner + Point(0.0, s), q.corner + Point(q.side, s)};
    for (const auto& p : pts)
      if (!inside(phi.forward(p), 2)) return false;
  }
  return true;
}

std::uint64_t cube_key(const AxisBox& q, std::uint64_t salt) {
  std::uint64_t h = splitmix64(salt);
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(q.side));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(q.corner[0]));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(q.corner[1]));
  return h;
}

}  // namespace smoothset
