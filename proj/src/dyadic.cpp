#include "smoothset/dyadic.hpp"

#include <algorithm>
#include <cmath>

namespace smoothset {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyBox: return "empty box";
    case ErrorKind::BadMagic: return "bad magic";
    case ErrorKind::Truncated: return "truncated";
    case ErrorKind::MassOutOfRange: return "mass out of range";
    case ErrorKind::BadHeader: return "bad header";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::EpsilonOutsideWindow: return "epsilon outside admissible window";
    case ErrorKind::TrivialSet: return "set too trivial at this resolution";
    case ErrorKind::RegionEscapesDomain: return "region escapes domain";
    case ErrorKind::MapRejected: return "map rejected";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

double DyadicCube::volume() const { return std::ldexp(1.0, -dim * level); }

Point DyadicCube::corner() const {
  Point c = Point::Zero();
  for (int i = 0; i < dim; ++i) c[i] = std::ldexp(static_cast<double>(index[i]), -level);
  return c;
}

Point DyadicCube::center() const {
  Point c = corner();
  for (int i = 0; i < dim; ++i) c[i] += 0.5 * side();
  return c;
}

DyadicCube DyadicCube::parent() const {
  require(level > 0, "level-0 cube has no parent");
  DyadicCube p{dim, level - 1, Index2::Zero()};
  for (int i = 0; i < dim; ++i) p.index[i] = index[i] >> 1;
  return p;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim != dim || other.level < level) return false;
  const int shift = other.level - level;
  for (int i = 0; i < dim; ++i)
    if ((other.index[i] >> shift) != index[i]) return false;
  return true;
}

std::vector<DyadicCube> children(const DyadicCube& q) {
  std::vector<DyadicCube> out;
  const int count = 1 << q.dim;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    DyadicCube ch{q.dim, q.level + 1, Index2::Zero()};
    for (int i = 0; i < q.dim; ++i) ch.index[i] = 2 * q.index[i] + ((c >> i) & 1);
    out.push_back(ch);
  }
  return out;
}

DyadicCube containing_cube(const Point& x, int level, int dim) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  require(level >= 0 && level <= 52, "level out of range");
  DyadicCube q{dim, level, Index2::Zero()};
  const double scale = std::ldexp(1.0, level);
  for (int i = 0; i < dim; ++i) q.index[i] = static_cast<std::int64_t>(std::floor(x[i] * scale));
  return q;
}

double AxisRect::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

bool AxisRect::empty() const {
  for (int i = 0; i < dim; ++i)
    if (!(hi[i] > lo[i])) return true;
  return false;
}

AxisRect AxisRect::clipped() const {
  AxisRect r = *this;
  for (int i = 0; i < dim; ++i) {
    r.lo[i] = std::clamp(lo[i], 0.0, 1.0);
    r.hi[i] = std::clamp(hi[i], 0.0, 1.0);
  }
  return r;
}

AxisBox AxisBox::centered(const Point& x, double h, int dim) {
  AxisBox b{dim, Point::Zero(), h};
  for (int i = 0; i < dim; ++i) b.corner[i] = x[i] - 0.5 * h;
  return b;
}

AxisBox AxisBox::from(const DyadicCube& q) { return AxisBox{q.dim, q.corner(), q.side()}; }

Point AxisBox::center() const {
  Point c = Point::Zero();
  for (int i = 0; i < dim; ++i) c[i] = corner[i] + 0.5 * side;
  return c;
}

double AxisBox::volume() const { return std::pow(side, dim); }

AxisBox AxisBox::scaled(double t) const { return centered(center(), t * side, dim); }

AxisBox AxisBox::translated(const Point& v) const {
  AxisBox b = *this;
  for (int i = 0; i < dim; ++i) b.corner[i] += v[i];
  return b;
}

AxisRect AxisBox::rect() const {
  AxisRect r{dim, Point::Zero(), Point::Zero()};
  for (int i = 0; i < dim; ++i) {
    r.lo[i] = corner[i];
    r.hi[i] = corner[i] + side;
  }
  return r;
}

bool AxisBox::inside_unit() const {
  for (int i = 0; i < dim; ++i)
    if (corner[i] < 0.0 || corner[i] + side > 1.0) return false;
  return true;
}

MassGrid::MassGrid(int dim, int level, std::vector<double> cells)
    : dim_(dim), level_(level), cells_(std::move(cells)) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  require(level >= 0 && dim * level <= 32, "resolution out of range");
  n_ = std::int64_t{1} << level;
  const std::size_t expected = static_cast<std::size_t>(std::int64_t{1} << (dim * level));
  require(cells_.size() == expected, "cell count does not match 2^(nK)");
  for (double m : cells_)
    if (!(m >= 0.0 && m <= 1.0)) throw Error(ErrorKind::MassOutOfRange, "mass out of range");

  const std::size_t w = static_cast<std::size_t>(n_ + 1);
  if (dim_ == 1) {
    prefix_.assign(w, 0.0);
    for (std::int64_t i = 0; i < n_; ++i) prefix_[i + 1] = prefix_[i] + cells_[i];
  } else {
    prefix_.assign(w * w, 0.0);
    for (std::int64_t j = 0; j < n_; ++j) {
      double row = 0.0;
      for (std::int64_t i = 0; i < n_; ++i) {
        row += cells_[i + j * n_];
        prefix_[(i + 1) + (j + 1) * w] = prefix_[(i + 1) + j * w] + row;
      }
    }
  }
}

double MassGrid::cell_volume() const { return std::ldexp(1.0, -dim_ * level_); }

double MassGrid::value_at(const Point& x) const {
  std::int64_t i = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x[0] * n_)), 0, n_ - 1);
  if (dim_ == 1) return cells_[i];
  std::int64_t j = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x[1] * n_)), 0, n_ - 1);
  return cells_[i + j * n_];
}

double MassGrid::cell_sum(std::int64_t i0, std::int64_t i1, std::int64_t j0, std::int64_t j1) const {
  if (dim_ == 1) return prefix_[i1] - prefix_[i0];
  const std::int64_t w = n_ + 1;
  return prefix_[i1 + j1 * w] - prefix_[i0 + j1 * w] - prefix_[i1 + j0 * w] + prefix_[i0 + j0 * w];
}

// Within one cell the density is constant, so the cumulative integral is the
// bilinear interpolant of the prefix table.
double MassGrid::cumulative(double u, double v) const {
  const std::int64_t i = std::min<std::int64_t>(static_cast<std::int64_t>(u), n_ - 1);
  const double fu = u - static_cast<double>(i);
  if (dim_ == 1) return prefix_[i] + fu * cells_[i];
  const std::int64_t j = std::min<std::int64_t>(static_cast<std::int64_t>(v), n_ - 1);
  const double fv = v - static_cast<double>(j);
  const std::int64_t w = n_ + 1;
  const double p00 = prefix_[i + j * w];
  const double p10 = prefix_[i + 1 + j * w];
  const double p01 = prefix_[i + (j + 1) * w];
  const double p11 = prefix_[i + 1 + (j + 1) * w];
  return p00 + fu * (p10 - p00) + fv * (p01 - p00) + fu * fv * (p11 - p10 - p01 + p00);
}

double MassGrid::mass(const AxisRect& r) const {
  const AxisRect c = r.clipped();
  if (c.empty()) return 0.0;
  const double s = static_cast<double>(n_);
  const double u0 = c.lo[0] * s, u1 = c.hi[0] * s;
  double m;
  if (dim_ == 1) {
    m = cumulative(u1, 0.0) - cumulative(u0, 0.0);
  } else {
    const double v0 = c.lo[1] * s, v1 = c.hi[1] * s;
    m = cumulative(u1, v1) - cumulative(u0, v1) - cumulative(u1, v0) + cumulative(u0, v0);
  }
  return std::max(0.0, m) * cell_volume();
}

double MassGrid::box_mass(const AxisBox& b) const {
  if (!(b.side > 0.0)) throw Error(ErrorKind::EmptyBox, "empty box");
  return mass(b.rect());
}

double MassGrid::total_mass() const { return cell_sum(0, n_, 0, n_) * cell_volume(); }

double MassGrid::density(const AxisRect& r) const {
  const AxisRect c = r.clipped();
  const double vol = c.volume();
  if (c.empty() || !(vol > 0.0)) throw Error(ErrorKind::EmptyBox, "empty box");
  return std::clamp(mass(c) / vol, 0.0, 1.0);
}

double MassGrid::cube_density(const AxisBox& b) const {
  if (!(b.side > 0.0)) throw Error(ErrorKind::EmptyBox, "empty box");
  return density(b.rect());
}

double MassGrid::cube_density(const DyadicCube& q) const {
  require(q.dim == dim_, "cube dimension does not match grid");
  if (q.level <= level_) {
    const int shift = level_ - q.level;
    const std::int64_t i0 = q.index[0] << shift, i1 = (q.index[0] + 1) << shift;
    const double cells = std::ldexp(1.0, dim_ * shift);
    if (dim_ == 1) return cell_sum(i0, i1) / cells;
    const std::int64_t j0 = q.index[1] << shift, j1 = (q.index[1] + 1) << shift;
    return cell_sum(i0, i1, j0, j1) / cells;
  }
  return value_at(q.corner());
}

std::uint64_t consecutive_pair_count(int dim, int j, int stride) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  require(j >= 0 && j <= stride && stride <= 30, "need 0 <= j <= stride");
  const std::int64_t steps = std::int64_t{1} << stride;
  const std::int64_t h = std::int64_t{1} << (stride - j);
  if (steps - 2 * h < 0) return 0;
  const std::uint64_t along = static_cast<std::uint64_t>(steps - 2 * h + 1);
  if (dim == 1) return along;
  const std::uint64_t across = static_cast<std::uint64_t>(steps - h + 1);
  return 2 * along * across;
}

}  // namespace smoothset
