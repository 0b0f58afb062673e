#pragma once

// Material fields (diffusivity tensor and density per cell) for the cloaked
// medium, the equivalent blown-up medium with a small inclusion B_eps, and
// the homogeneous reference.

#include "heatcloak/blowup_map.hpp"
#include "heatcloak/grid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatcloak {

class MediumError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Contents of the cloaked region B_1, with the ellipticity bound Λ the
/// tensor is required to satisfy.
template <int D>
struct ObjectSpec {
  std::function<SymTensor<D>(const Point<D>&)> tensor;
  std::function<double(const Point<D>&)> density;
  double ellipticity_bound = 10.0;

  static ObjectSpec constant(double conductivity, double density, double bound) {
    return {[conductivity](const Point<D>&) -> SymTensor<D> { return conductivity * SymTensor<D>::Identity(); },
            [density](const Point<D>&) { return density; }, bound};
  }

  /// a_O = 2I, rho_O = 3.
  static ObjectSpec standard() { return constant(2.0, 3.0, 2.0); }
};

enum class CellRegion { exterior, cloak_layer, object, inclusion };

inline const char* to_string(CellRegion r) {
  switch (r) {
    case CellRegion::exterior: return "exterior";
    case CellRegion::cloak_layer: return "cloak_layer";
    case CellRegion::object: return "object";
    case CellRegion::inclusion: return "inclusion";
  }
  return "?";
}

/// Piecewise-constant coefficients, one value per cell, sampled at cell
/// centers.
template <int D>
struct MaterialField {
  std::vector<SymTensor<D>> tensor;
  std::vector<double> density;
  std::vector<CellRegion> region;

  std::size_t size() const { return density.size(); }
};

template <int D>
std::pair<double, double> eigen_range(const SymTensor<D>& a) {
  Eigen::SelfAdjointEigenSolver<SymTensor<D>> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

namespace detail {

template <class Grid>
void require_covers_b2(const Grid& grid) {
  if (!grid.contains_ball(2.0)) throw MediumError("medium: grid must contain the closed ball B_2");
}

// Checks Λ^{-1} <= eig(a_O) <= Λ and rho_O > 0 at every sampled point.
template <int D>
void require_admissible_object(const ObjectSpec<D>& obj, const Point<D>& p) {
  const SymTensor<D> a = obj.tensor(p);
  if ((a - a.transpose()).norm() > 1e-12 * (1.0 + a.norm()))
    throw MediumError("object tensor is not symmetric");
  const auto [lo, hi] = eigen_range<D>(a);
  const double bound = obj.ellipticity_bound;
  if (!(bound >= 1.0) || lo < 1.0 / bound - 1e-12 || hi > bound + 1e-12)
    throw MediumError("object tensor violates the ellipticity bound");
  if (!(obj.density(p) > 0.0)) throw MediumError("object density must be positive");
}

}  // namespace detail

/// (I, 1) everywhere.
template <class Grid>
MaterialField<Grid::dimension> homogeneous_medium(const Grid& grid) {
  constexpr int D = Grid::dimension;
  MaterialField<D> m;
  m.tensor.assign(grid.cell_count(), SymTensor<D>::Identity());
  m.density.assign(grid.cell_count(), 1.0);
  m.region.assign(grid.cell_count(), CellRegion::exterior);
  return m;
}

/// Cloaked medium: (I, 1) outside B_2, (F_*I, F_*1) in B_2 \ B_1 and the
/// object (a_O, rho_O) in B_1.
template <class Grid>
MaterialField<Grid::dimension> assemble_cloak_medium(const BlowupMap<Grid::dimension>& map,
                                                     const ObjectSpec<Grid::dimension>& obj, const Grid& grid) {
  constexpr int D = Grid::dimension;
  detail::require_covers_b2(grid);
  const auto unit_tensor = [](const Point<D>&) -> SymTensor<D> { return SymTensor<D>::Identity(); };
  const auto unit_density = [](const Point<D>&) { return 1.0; };
  MaterialField<D> m;
  m.tensor.resize(grid.cell_count());
  m.density.resize(grid.cell_count());
  m.region.resize(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Point<D> y = grid.cell_center(c);
    const double r = y.norm();
    if (r >= 2.0) {
      m.tensor[c] = SymTensor<D>::Identity();
      m.density[c] = 1.0;
      m.region[c] = CellRegion::exterior;
    } else if (r >= 1.0) {
      m.tensor[c] = push_forward_tensor(unit_tensor, map, y);
      m.density[c] = push_forward_density(unit_density, map, y);
      m.region[c] = CellRegion::cloak_layer;
    } else {
      detail::require_admissible_object(obj, y);
      m.tensor[c] = obj.tensor(y);
      m.density[c] = obj.density(y);
      m.region[c] = CellRegion::object;
    }
  }
  return m;
}

/// Blown-up medium: (I, 1) outside B_eps and
/// (eps^{2-d} a_O(x/eps), eps^{-d} rho_O(x/eps)) inside.
template <class Grid>
MaterialField<Grid::dimension> assemble_blownup_medium(const BlowupMap<Grid::dimension>& map,
                                                       const ObjectSpec<Grid::dimension>& obj, const Grid& grid) {
  constexpr int D = Grid::dimension;
  detail::require_covers_b2(grid);
  const double eps = map.epsilon();
  const double tensor_scale = std::pow(eps, 2 - D);
  const double density_scale = std::pow(eps, -D);
  MaterialField<D> m = homogeneous_medium(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Point<D> x = grid.cell_center(c);
    if (x.norm() >= eps) continue;
    const Point<D> y = x / eps;
    detail::require_admissible_object(obj, y);
    m.tensor[c] = tensor_scale * obj.tensor(y);
    m.density[c] = density_scale * obj.density(y);
    m.region[c] = CellRegion::inclusion;
  }
  return m;
}

struct RegionBounds {
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_eigenvalue = -std::numeric_limits<double>::infinity();
  double min_density = std::numeric_limits<double>::infinity();
  double max_density = -std::numeric_limits<double>::infinity();
  std::size_t cells = 0;
};

struct EllipticityReport {
  std::map<CellRegion, RegionBounds> regions;
  std::size_t tensor_violations = 0;   // eigenvalue outside [lower, upper]
  std::size_t density_violations = 0;  // density not strictly positive
  std::size_t asymmetric_cells = 0;

  bool ok() const { return tensor_violations == 0 && density_violations == 0 && asymmetric_cells == 0; }
};

/// Per-region eigenvalue and density ranges, with cells whose eigenvalues
/// leave [lower, upper] counted as violations.
template <int D>
EllipticityReport check_ellipticity(const MaterialField<D>& field, double lower, double upper) {
  EllipticityReport rep;
  for (std::size_t c = 0; c < field.size(); ++c) {
    const SymTensor<D>& a = field.tensor[c];
    if ((a - a.transpose()).norm() > 1e-12 * (1.0 + a.norm())) ++rep.asymmetric_cells;
    const auto [lo, hi] = eigen_range<D>(a);
    const double rho = field.density[c];
    auto& b = rep.regions[field.region[c]];
    b.min_eigenvalue = std::min(b.min_eigenvalue, lo);
    b.max_eigenvalue = std::max(b.max_eigenvalue, hi);
    b.min_density = std::min(b.min_density, rho);
    b.max_density = std::max(b.max_density, rho);
    ++b.cells;
    if (lo < lower || hi > upper) ++rep.tensor_violations;
    if (!(rho > 0.0)) ++rep.density_violations;
  }
  return rep;
}

}  // namespace heatcloak
