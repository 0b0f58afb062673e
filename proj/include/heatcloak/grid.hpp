#pragma once

// Discretizations of Omega: a uniform Cartesian grid of square cells for
// d = 2, and a graded radial grid for radially symmetric problems in d = 2, 3.

#include "heatcloak/blowup_map.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace heatcloak {

using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;

enum class Region { exterior, cloak_layer, object };

/// Classifies a point against the cloak geometry B_1 ⊂ B_2.
template <int D>
Region classify(const Point<D>& p) {
  const double r = p.norm();
  if (r >= 2.0) return Region::exterior;
  if (r >= 1.0) return Region::cloak_layer;
  return Region::object;
}

class GridError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform grid of nx × ny square cells of side h with lower-left corner
/// (x0, y0). Node (ix, iy) sits at (x0 + ix h, y0 + iy h); node index is
/// iy (nx + 1) + ix. Boundary nodes carry the Dirichlet condition.
class Grid2D {
public:
  static constexpr int dimension = 2;
  static constexpr int nodes_per_cell = 4;

  Grid2D(double x0, double y0, double h, int nx, int ny) : x0_(x0), y0_(y0), h_(h), nx_(nx), ny_(ny) {
    if (!(h > 0.0) || nx < 1 || ny < 1) throw GridError("Grid2D: need h > 0 and at least one cell");
  }

  /// Square [lo, hi]² with n cells per side.
  static Grid2D square(double lo, double hi, int n) { return Grid2D(lo, lo, (hi - lo) / n, n, n); }

  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x_min() const { return x0_; }
  double y_min() const { return y0_; }
  double x_max() const { return x0_ + nx_ * h_; }
  double y_max() const { return y0_ + ny_ * h_; }

  std::size_t node_count() const { return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1); }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * ny_; }

  int node_index(int ix, int iy) const { return iy * (nx_ + 1) + ix; }
  int node_ix(std::size_t n) const { return static_cast<int>(n % (nx_ + 1)); }
  int node_iy(std::size_t n) const { return static_cast<int>(n / (nx_ + 1)); }

  Point<2> node(std::size_t n) const { return {x0_ + node_ix(n) * h_, y0_ + node_iy(n) * h_}; }

  bool is_dirichlet(std::size_t n) const {
    const int ix = node_ix(n), iy = node_iy(n);
    return ix == 0 || iy == 0 || ix == nx_ || iy == ny_;
  }

  Region node_region(std::size_t n) const { return classify<2>(node(n)); }

  /// Counter-clockwise from the lower-left corner.
  std::array<int, 4> cell_nodes(std::size_t c) const {
    const int cx = static_cast<int>(c % nx_), cy = static_cast<int>(c / nx_);
    const int n0 = node_index(cx, cy);
    return {n0, n0 + 1, n0 + nx_ + 2, n0 + nx_ + 1};
  }

  Point<2> cell_center(std::size_t c) const {
    const int cx = static_cast<int>(c % nx_), cy = static_cast<int>(c / nx_);
    return {x0_ + (cx + 0.5) * h_, y0_ + (cy + 0.5) * h_};
  }

  /// True when the open box strictly contains the closed ball B_radius.
  bool contains_ball(double radius) const {
    return x0_ < -radius && y0_ < -radius && x_max() > radius && y_max() > radius;
  }

  bool same_as(const Grid2D& o) const {
    return x0_ == o.x0_ && y0_ == o.y0_ && h_ == o.h_ && nx_ == o.nx_ && ny_ == o.ny_;
  }

private:
  double x0_, y0_, h_;
  int nx_, ny_;
};

/// Nodes 0 = r_0 < r_1 < ... < r_N = R on [0, R], for fields depending on
/// |x| only. The outer node carries the Dirichlet condition; r = 0 is a
/// symmetry point. Node and cell-center points lie on the first axis so the
/// same material routines serve Cartesian and radial grids.
template <int D>
class RadialGrid {
  static_assert(D == 2 || D == 3);

public:
  static constexpr int dimension = D;
  static constexpr int nodes_per_cell = 2;

  explicit RadialGrid(std::vector<double> radii) : radii_(std::move(radii)) {
    if (radii_.size() < 3 || radii_.front() != 0.0)
      throw GridError("RadialGrid: need at least three nodes starting at r = 0");
    for (std::size_t i = 1; i < radii_.size(); ++i)
      if (!(radii_[i] > radii_[i - 1])) throw GridError("RadialGrid: radii must increase strictly");
  }

  /// Grid on [0, outer] with spacing at most `spacing`, refined
  /// geometrically (ratio `growth`) towards each breakpoint, which becomes a
  /// node. The spacing at breakpoint b is min(spacing, b / 16), so at least
  /// 16 cells resolve B_b for every breakpoint b.
  static RadialGrid graded(double outer, std::vector<double> breakpoints, double spacing,
                           double growth = 1.08) {
    if (!(outer > 0.0) || !(spacing > 0.0) || !(growth > 1.0))
      throw GridError("RadialGrid::graded: bad parameters");
    std::erase_if(breakpoints, [&](double b) { return !(b > 0.0 && b < outer); });
    breakpoints.push_back(outer);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    auto local_spacing = [&](double r) {
      double hh = spacing;
      for (double b : breakpoints) {
        if (b == outer) continue;
        hh = std::min(hh, std::min(spacing, b / 16.0) + (growth - 1.0) * std::abs(r - b));
      }
      return hh;
    };

    std::vector<double> radii{0.0};
    double start = 0.0;
    for (double stop : breakpoints) {
      // March towards the breakpoint; the last cell absorbs the remainder.
      double r = start;
      while (true) {
        const double step = std::min(local_spacing(r), local_spacing(std::min(r + local_spacing(r), stop)));
        if (r + 1.5 * step >= stop) break;
        r += step;
        radii.push_back(r);
      }
      radii.push_back(stop);
      start = stop;
    }
    return RadialGrid(std::move(radii));
  }

  const std::vector<double>& radii() const { return radii_; }
  double outer_radius() const { return radii_.back(); }

  std::size_t node_count() const { return radii_.size(); }
  std::size_t cell_count() const { return radii_.size() - 1; }

  Point<D> node(std::size_t n) const { return on_axis(radii_[n]); }
  bool is_dirichlet(std::size_t n) const { return n + 1 == radii_.size(); }
  Region node_region(std::size_t n) const { return classify<D>(node(n)); }

  std::array<int, 2> cell_nodes(std::size_t c) const {
    return {static_cast<int>(c), static_cast<int>(c + 1)};
  }
  Point<D> cell_center(std::size_t c) const { return on_axis(0.5 * (radii_[c] + radii_[c + 1])); }

  bool contains_ball(double radius) const { return outer_radius() > radius; }

  std::size_t nodes_below(double r) const {
    return static_cast<std::size_t>(std::count_if(radii_.begin(), radii_.end(), [&](double x) { return x < r; }));
  }

  bool same_as(const RadialGrid& o) const { return radii_ == o.radii_; }

  /// Surface measure of the unit sphere: 2π in 2D, 4π in 3D.
  static constexpr double sphere_area() { return D == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi; }

private:
  static Point<D> on_axis(double r) {
    Point<D> p = Point<D>::Zero();
    p[0] = r;
    return p;
  }

  std::vector<double> radii_;
};

/// Maps grid nodes to unknowns, skipping Dirichlet nodes.
class DofMap {
public:
  template <class Grid>
  explicit DofMap(const Grid& grid) : node_to_dof_(grid.node_count(), -1) {
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      if (grid.is_dirichlet(n)) continue;
      node_to_dof_[n] = static_cast<int>(dof_to_node_.size());
      dof_to_node_.push_back(static_cast<int>(n));
    }
  }

  std::size_t size() const { return dof_to_node_.size(); }
  std::size_t node_count() const { return node_to_dof_.size(); }
  int dof(std::size_t node) const { return node_to_dof_[node]; }
  int node(std::size_t dof) const { return dof_to_node_[dof]; }

  template <class Vec>
  Vec restrict(const Vec& nodal) const {
    Vec out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = nodal[dof_to_node_[k]];
    return out;
  }

  /// Scatters unknowns back to nodes; Dirichlet nodes get zero.
  template <class Vec>
  Vec extend(const Vec& dofs) const {
    Vec out = Vec::Zero(node_count());
    for (std::size_t k = 0; k < size(); ++k) out[dof_to_node_[k]] = dofs[k];
    return out;
  }

private:
  std::vector<int> node_to_dof_;
  std::vector<int> dof_to_node_;
};

/// Samples fn at every node.
template <class Grid, class Fn>
auto interpolate(const Grid& grid, const Fn& fn) {
  using Value = decltype(fn(grid.node(0)));
  Eigen::Matrix<Value, Eigen::Dynamic, 1> out(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) out[n] = fn(grid.node(n));
  return out;
}

/// Writes a nodal field as CSV with header `ix,iy,x,y,re,im`. Radial grids
/// write iy = 0 and y = 0 with x the radius.
template <class Grid, class Vec>
void write_field_csv(std::ostream& os, const Grid& grid, const Vec& field) {
  os << "ix,iy,x,y,re,im\n";
  os.precision(17);
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const auto p = grid.node(n);
    const std::complex<double> v = field[n];
    int ix = static_cast<int>(n), iy = 0;
    double y = 0.0;
    if constexpr (std::is_same_v<Grid, Grid2D>) {
      ix = grid.node_ix(n);
      iy = grid.node_iy(n);
      y = p[1];
    }
    os << ix << ',' << iy << ',' << p[0] << ',' << y << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

}  // namespace heatcloak
