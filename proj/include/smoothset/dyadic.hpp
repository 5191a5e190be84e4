#pragma once

// Cube geometry and the prefix-sum density engine.
//
// A set A in [0,1]^n (n = 1 or 2) is stored at resolution K as the fraction of
// each of the 2^{nK} cells that A occupies.  Inside a cell A is modelled as
// uniformly spread, which is the only approximation in the library: masses of
// cell-aligned boxes are exact sums, other boxes pick up partial cells in
// proportion to the overlap volume.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "smoothset/error.hpp"

namespace smoothset {

using Point = Eigen::Vector2d;
using Index2 = Eigen::Matrix<std::int64_t, 2, 1>;

inline constexpr int kMaxDim = 2;

/// Half-open dyadic cube prod_i [m_i 2^-k, (m_i+1) 2^-k).
struct DyadicCube {
  int dim = 1;
  int level = 0;
  Index2 index = Index2::Zero();

  double side() const;
  double volume() const;
  /// Lower corner in [0,1]^n.
  Point corner() const;
  Point center() const;
  DyadicCube parent() const;
  /// True when `other` is this cube or one of its descendants.
  bool contains(const DyadicCube& other) const;

  friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
    return a.dim == b.dim && a.level == b.level && a.index == b.index;
  }
};

/// The 2^n level-(k+1) cubes partitioning q, in row-major order with the
/// first coordinate fastest.
std::vector<DyadicCube> children(const DyadicCube& q);

/// Q_k(x): the unique level-k dyadic cube containing x.
DyadicCube containing_cube(const Point& x, int level, int dim);

/// Axis-parallel rectangle [lo, hi).  Used for slabs and for clipped cubes.
struct AxisRect {
  int dim = 1;
  Point lo = Point::Zero();
  Point hi = Point::Zero();

  double volume() const;
  bool empty() const;
  AxisRect clipped() const;
};

/// Axis-parallel cube with lower corner `corner` and sidelength `side`.
struct AxisBox {
  int dim = 1;
  Point corner = Point::Zero();
  double side = 0.0;

  /// Q(x, h): the cube centred at x with sidelength h.
  static AxisBox centered(const Point& x, double h, int dim);
  static AxisBox from(const DyadicCube& q);

  Point center() const;
  double volume() const;
  /// tQ: same centre, sidelength t * side.
  AxisBox scaled(double t) const;
  AxisBox translated(const Point& v) const;
  AxisRect rect() const;
  bool inside_unit() const;
};

/// Two equal cubes whose closures share the face orthogonal to
/// `sharedFaceAxis`; `second` sits on the positive side.
struct ConsecutivePair {
  AxisBox first;
  AxisBox second;
  int sharedFaceAxis = 0;
};

/// Fractional-occupancy representation of a set with O(1) box-mass queries.
/// Immutable after construction.
class MassGrid {
 public:
  MassGrid(int dim, int level, std::vector<double> cells);

  int dim() const { return dim_; }
  int level() const { return level_; }
  /// Cells per axis, 2^K.
  std::int64_t side_cells() const { return n_; }
  std::size_t cell_count() const { return cells_.size(); }
  double cell_volume() const;
  std::span<const double> cells() const { return cells_; }
  double cell(std::int64_t i, std::int64_t j = 0) const {
    return cells_[static_cast<std::size_t>(i + j * n_)];
  }
  /// Value of the piecewise-constant density at x; x must lie in [0,1)^n.
  double value_at(const Point& x) const;

  /// Sum of cell masses over [i0,i1) x [j0,j1), in cell units (exact for
  /// integer-scaled masses).  For n = 1 the j range is ignored.
  double cell_sum(std::int64_t i0, std::int64_t i1, std::int64_t j0 = 0,
                  std::int64_t j1 = 1) const;

  /// |A n r| after clipping r to [0,1]^n.
  double mass(const AxisRect& r) const;
  double box_mass(const AxisBox& b) const;
  /// |A n [0,1]^n|.
  double total_mass() const;

  /// D(Q) over the clipped box; throws EmptyBox when nothing is left.
  double density(const AxisRect& r) const;
  double cube_density(const AxisBox& b) const;
  double cube_density(const DyadicCube& q) const;

  friend bool operator==(const MassGrid& a, const MassGrid& b) {
    return a.dim_ == b.dim_ && a.level_ == b.level_ && a.cells_ == b.cells_;
  }

 private:
  // Integral of the density over [0,x) x [0,y) in cell units.
  double cumulative(double u, double v) const;

  int dim_;
  int level_;
  std::int64_t n_;
  std::vector<double> cells_;
  // Inclusive prefix table with a zero border, (n+1)^dim entries.
  std::vector<double> prefix_;
};

/// Enumerates every consecutive pair of cubes of sidelength 2^-j whose lower
/// corners lie on the 2^-S lattice and which lie inside [0,1]^n.  With S = j
/// this is the dyadic grid.  Calls fn(const ConsecutivePair&).
template <class Fn>
void for_each_consecutive_pair(int dim, int j, int stride, Fn&& fn);

std::uint64_t consecutive_pair_count(int dim, int j, int stride);

// ---------------------------------------------------------------------------

template <class Fn>
void for_each_consecutive_pair(int dim, int j, int stride, Fn&& fn) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  require(j >= 0 && j <= stride && stride <= 30, "need 0 <= j <= stride");
  const std::int64_t steps = std::int64_t{1} << stride;
  const std::int64_t h = std::int64_t{1} << (stride - j);
  const double unit = 1.0 / static_cast<double>(steps);
  const double side = static_cast<double>(h) * unit;
  for (int axis = 0; axis < dim; ++axis) {
    const std::int64_t lastAlong = steps - 2 * h;
    const std::int64_t lastAcross = dim == 2 ? steps - h : 0;
    if (lastAlong < 0) continue;
    for (std::int64_t across = 0; across <= lastAcross; ++across) {
      for (std::int64_t along = 0; along <= lastAlong; ++along) {
        ConsecutivePair pair;
        pair.sharedFaceAxis = axis;
        Point c = Point::Zero();
        c[axis] = static_cast<double>(along) * unit;
        if (dim == 2) c[1 - axis] = static_cast<double>(across) * unit;
        pair.first = AxisBox{dim, c, side};
        Point c2 = c;
        c2[axis] += side;
        pair.second = AxisBox{dim, c2, side};
        fn(pair);
      }
    }
  }
}

}  // namespace smoothset
