#pragma once

// Galerkin discretization of -div(A grad u) and of the rho-weighted mass term:
// bilinear elements with 2×2 Gauss quadrature on Grid2D, piecewise-linear
// elements with the r^{d-1} weight on RadialGrid. Dirichlet nodes are
// eliminated. Also discrete L2 / H1 norms over cell regions.

#include "heatcloak/grid.hpp"
#include "heatcloak/medium.hpp"
#include "heatcloak/sparse.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace heatcloak {

using cplx = std::complex<double>;

class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss points on [0, 1] for the 2-point rule.
inline constexpr std::array<double, 2> gauss2 = {0.5 - 0.28867513459481288225, 0.5 + 0.28867513459481288225};

// Reference bilinear element on [0,1]²: values and gradients at the 4
// quadrature points (each with weight 1/4).
struct BilinearReference {
  std::array<std::array<double, 4>, 4> value{};             // [q][i]
  std::array<std::array<std::array<double, 2>, 4>, 4> grad{};  // [q][i][axis]
  std::array<std::array<double, 4>, 4> mass{};              // ∫ φi φj
  // ∫ ∂a φi ∂b φj for (a, b) in {(0,0), (0,1), (1,1)}.
  std::array<std::array<std::array<double, 4>, 4>, 3> stiff{};

  BilinearReference() {
    int q = 0;
    for (double eta : gauss2)
      for (double xi : gauss2) {
        value[q] = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
        grad[q][0] = {-(1 - eta), -(1 - xi)};
        grad[q][1] = {(1 - eta), -xi};
        grad[q][2] = {eta, xi};
        grad[q][3] = {-eta, (1 - xi)};
        ++q;
      }
    for (int qq = 0; qq < 4; ++qq)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          mass[i][j] += 0.25 * value[qq][i] * value[qq][j];
          stiff[0][i][j] += 0.25 * grad[qq][i][0] * grad[qq][j][0];
          stiff[1][i][j] += 0.25 * grad[qq][i][0] * grad[qq][j][1];
          stiff[2][i][j] += 0.25 * grad[qq][i][1] * grad[qq][j][1];
        }
  }
};

inline const BilinearReference& bilinear() {
  static const BilinearReference ref;
  return ref;
}

// 3-point Gauss on [0, 1].
inline constexpr std::array<double, 3> gauss3_x = {0.5 - 0.38729833462074168852, 0.5, 0.5 + 0.38729833462074168852};
inline constexpr std::array<double, 3> gauss3_w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

template <int D>
double shell_measure(double r0, double r1) {
  return RadialGrid<D>::sphere_area() * (std::pow(r1, D) - std::pow(r0, D)) / D;
}

// ∫_{r0}^{r1} S r^{d-1} φi φj dr for the two linear hats.
template <int D>
std::array<std::array<double, 2>, 2> radial_mass(double r0, double r1) {
  std::array<std::array<double, 2>, 2> m{};
  const double len = r1 - r0;
  for (int q = 0; q < 3; ++q) {
    const double t = gauss3_x[q];
    const double r = r0 + t * len;
    const double w = gauss3_w[q] * len * RadialGrid<D>::sphere_area() * std::pow(r, D - 1);
    const double phi[2] = {1 - t, t};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] += w * phi[i] * phi[j];
  }
  return m;
}

template <int D>
void require_positive_tensor(const SymTensor<D>& a, std::size_t cell) {
  const auto [lo, hi] = eigen_range<D>(a);
  if (!(lo > 0.0) || !std::isfinite(hi))
    throw AssemblyError("assembly: non-positive tensor eigenvalue in cell " + std::to_string(cell));
}

// Element matrices (stiffness, mass with unit density) for one cell, in the
// local node order of grid.cell_nodes(c).
template <int D>
void element_matrices(const Grid2D& grid, std::size_t, const SymTensor<D>& a,
                      std::array<std::array<double, 4>, 4>& ke, std::array<std::array<double, 4>, 4>& me) {
  const auto& ref = bilinear();
  const double h2 = grid.h() * grid.h();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      // Σ_ab A_ab ∫ ∂a φi ∂b φj; the h factors cancel in 2D.
      ke[i][j] = a(0, 0) * ref.stiff[0][i][j] + a(0, 1) * (ref.stiff[1][i][j] + ref.stiff[1][j][i]) +
                 a(1, 1) * ref.stiff[2][i][j];
      me[i][j] = h2 * ref.mass[i][j];
    }
}

template <int D>
void element_matrices(const RadialGrid<D>& grid, std::size_t c, const SymTensor<D>& a,
                      std::array<std::array<double, 2>, 2>& ke, std::array<std::array<double, 2>, 2>& me) {
  const double r0 = grid.radii()[c], r1 = grid.radii()[c + 1];
  const double len = r1 - r0;
  const double k = a(0, 0) * shell_measure<D>(r0, r1) / (len * len);
  ke = {{{k, -k}, {-k, k}}};
  me = radial_mass<D>(r0, r1);
}

}  // namespace detail

/// Stiffness K and rho-weighted mass M over the free nodes.
struct FemMatrices {
  CsrMatrix<double> stiffness;
  CsrMatrix<double> mass;
};

template <class Grid>
FemMatrices assemble_matrices(const MaterialField<Grid::dimension>& field, const Grid& grid, const DofMap& dofs) {
  constexpr int D = Grid::dimension;
  constexpr int nc = Grid::nodes_per_cell;
  if (field.size() != grid.cell_count()) throw AssemblyError("assembly: field and grid are not conformal");
  std::vector<Eigen::Triplet<double, int>> kt, mt;
  kt.reserve(grid.cell_count() * nc * nc);
  mt.reserve(grid.cell_count() * nc * nc);
  std::array<std::array<double, nc>, nc> ke, me;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const SymTensor<D>& a = field.tensor[c];
    detail::require_positive_tensor<D>(a, c);
    if (!(field.density[c] > 0.0)) throw AssemblyError("assembly: non-positive density");
    detail::element_matrices<D>(grid, c, a, ke, me);
    const auto nodes = grid.cell_nodes(c);
    for (int i = 0; i < nc; ++i) {
      const int di = dofs.dof(nodes[i]);
      if (di < 0) continue;
      for (int j = 0; j < nc; ++j) {
        const int dj = dofs.dof(nodes[j]);
        if (dj < 0) continue;
        kt.emplace_back(di, dj, ke[i][j]);
        mt.emplace_back(di, dj, field.density[c] * me[i][j]);
      }
    }
  }
  const int n = static_cast<int>(dofs.size());
  FemMatrices out{CsrMatrix<double>(n, n), CsrMatrix<double>(n, n)};
  out.stiffness.setFromTriplets(kt.begin(), kt.end());
  out.mass.setFromTriplets(mt.begin(), mt.end());
  return out;
}

/// K - ζ M: the discrete form of -div(A grad ·) - ζ rho ·.
inline CsrMatrix<cplx> shifted_operator(const FemMatrices& fm, cplx shift) {
  CsrMatrix<cplx> out = fm.stiffness.cast<cplx>() - shift * fm.mass.cast<cplx>();
  out.makeCompressed();
  return out;
}

template <class Grid>
CsrMatrix<cplx> assemble_operator(const MaterialField<Grid::dimension>& field, const Grid& grid, cplx shift) {
  return shifted_operator(assemble_matrices(field, grid, DofMap(grid)), shift);
}

/// ∫ f φ_i over the free nodes for a nodal field f (its piecewise
/// bilinear/linear interpolant), optionally weighted by a per-cell density.
template <class Grid, class Vec>
auto load_vector(const Grid& grid, const DofMap& dofs, const Vec& nodal, const std::vector<double>* density = nullptr) {
  constexpr int D = Grid::dimension;
  constexpr int nc = Grid::nodes_per_cell;
  using Scalar = typename Vec::Scalar;
  Vector<Scalar> out = Vector<Scalar>::Zero(dofs.size());
  std::array<std::array<double, nc>, nc> ke, me;
  const SymTensor<D> unit = SymTensor<D>::Identity();
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    detail::element_matrices<D>(grid, c, unit, ke, me);
    const double w = density ? (*density)[c] : 1.0;
    const auto nodes = grid.cell_nodes(c);
    for (int i = 0; i < nc; ++i) {
      const int di = dofs.dof(nodes[i]);
      if (di < 0) continue;
      Scalar acc = 0;
      for (int j = 0; j < nc; ++j) acc += me[i][j] * nodal[nodes[j]];
      out[di] += w * acc;
    }
  }
  return out;
}

template <int D>
using RegionPredicate = std::function<bool(const Point<D>&)>;

template <int D>
RegionPredicate<D> outside_ball(double radius) {
  return [radius](const Point<D>& p) { return p.norm() >= radius; };
}

template <int D>
RegionPredicate<D> everywhere() {
  return [](const Point<D>&) { return true; };
}

struct NormPair {
  double l2 = 0.0;
  double grad = 0.0;  // L2 norm of the gradient
  double h1() const { return std::sqrt(l2 * l2 + grad * grad); }
};

/// L2 norm and gradient norm of a nodal field over the cells whose vertices
/// all satisfy `region`. Throws when no cell qualifies.
template <class Grid, class Vec>
NormPair field_norms(const Vec& f, const Grid& grid, const RegionPredicate<Grid::dimension>& region) {
  constexpr int D = Grid::dimension;
  double l2 = 0.0, g2 = 0.0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    bool inside = true;
    for (int n : nodes) inside = inside && region(grid.node(n));
    if (!inside) continue;
    ++used;
    if constexpr (std::is_same_v<Grid, Grid2D>) {
      const auto& ref = detail::bilinear();
      const double h = grid.h();
      for (int q = 0; q < 4; ++q) {
        std::complex<double> v = 0, gx = 0, gy = 0;
        for (int i = 0; i < 4; ++i) {
          const std::complex<double> fi = f[nodes[i]];
          v += ref.value[q][i] * fi;
          gx += ref.grad[q][i][0] * fi;
          gy += ref.grad[q][i][1] * fi;
        }
        l2 += 0.25 * h * h * std::norm(v);
        g2 += 0.25 * (std::norm(gx) + std::norm(gy));
      }
    } else {
      const double r0 = grid.radii()[c], r1 = grid.radii()[c + 1];
      const double len = r1 - r0;
      const std::complex<double> f0 = f[nodes[0]], f1 = f[nodes[1]];
      for (int q = 0; q < 3; ++q) {
        const double t = detail::gauss3_x[q];
        const double r = r0 + t * len;
        l2 += detail::gauss3_w[q] * len * RadialGrid<D>::sphere_area() * std::pow(r, D - 1) *
              std::norm((1 - t) * f0 + t * f1);
      }
      g2 += std::norm((f1 - f0) / len) * detail::shell_measure<D>(r0, r1);
    }
  }
  if (used == 0) throw std::invalid_argument("field_norms: empty region");
  return {std::sqrt(l2), std::sqrt(g2)};
}

template <class Grid, class Vec>
double norm_L2(const Vec& f, const Grid& grid, const RegionPredicate<Grid::dimension>& region) {
  return field_norms(f, grid, region).l2;
}

template <class Grid, class Vec>
double norm_H1(const Vec& f, const Grid& grid, const RegionPredicate<Grid::dimension>& region) {
  return field_norms(f, grid, region).h1();
}

/// Bilinear interpolation of a nodal field at a point inside the grid box.
template <class Vec>
auto evaluate(const Grid2D& grid, const Vec& f, const Point<2>& p) {
  using Scalar = typename Vec::Scalar;
  const double sx = std::clamp((p[0] - grid.x_min()) / grid.h(), 0.0, static_cast<double>(grid.nx()));
  const double sy = std::clamp((p[1] - grid.y_min()) / grid.h(), 0.0, static_cast<double>(grid.ny()));
  const int cx = std::min(static_cast<int>(sx), grid.nx() - 1);
  const int cy = std::min(static_cast<int>(sy), grid.ny() - 1);
  const double xi = sx - cx, eta = sy - cy;
  const int n0 = grid.node_index(cx, cy);
  const Scalar v = (1 - xi) * (1 - eta) * f[n0] + xi * (1 - eta) * f[n0 + 1] + xi * eta * f[n0 + grid.nx() + 2] +
                   (1 - xi) * eta * f[n0 + grid.nx() + 1];
  return v;
}

/// Linear interpolation in r of a nodal radial field.
template <int D, class Vec>
auto evaluate(const RadialGrid<D>& grid, const Vec& f, double r) {
  using Scalar = typename Vec::Scalar;
  const auto& rad = grid.radii();
  if (r >= rad.back()) return Scalar(f[rad.size() - 1]);
  const auto it = std::upper_bound(rad.begin(), rad.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - rad.begin()) - 1;
  const double t = (r - rad[i]) / (rad[i + 1] - rad[i]);
  return Scalar((1 - t) * f[i] + t * f[i + 1]);
}

}  // namespace heatcloak
