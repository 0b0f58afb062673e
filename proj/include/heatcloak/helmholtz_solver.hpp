#pragma once

// Frequency-domain problems  div(A grad v) + i ω rho v = g,  v = 0 on the
// boundary, and the radial exterior problem  Δv + i ω ε² v = 0  outside B_1.

#include "heatcloak/fem.hpp"
#include "heatcloak/grid.hpp"
#include "heatcloak/medium.hpp"
#include "heatcloak/sparse.hpp"
#include "heatcloak/special_functions.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace heatcloak {

/// Assembled K and M for one medium, reused across frequencies.
template <class Grid>
class FrequencySolver {
public:
  static constexpr int D = Grid::dimension;

  FrequencySolver(const MaterialField<D>& field, const Grid& grid)
      : grid_(grid), dofs_(grid), matrices_(assemble_matrices(field, grid, dofs_)) {}

  /// Solves (K - iωM) v = rhs over the free nodes.
  Vector<cplx> solve_dofs(double omega, const Vector<cplx>& rhs, const SolveOptions& opt = {}) const {
    SparseSystem<cplx> sys{shifted_operator(matrices_, cplx(0.0, omega)), rhs};
    try {
      return solve_sparse(sys, opt).solution;
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "frequency solve failed at omega = " << omega << ": " << e.what();
      throw SolverError(msg.str(), e.relative_residual);
    }
  }

  /// Nodal solution of div(A grad v) + iω rho v = g for nodal g.
  ComplexField solve(double omega, const ComplexField& g, const SolveOptions& opt = {}) const {
    if (!(omega > 0.0)) throw std::invalid_argument("solve_frequency: omega must be positive");
    const Vector<cplx> rhs = -load_vector(grid_, dofs_, g);
    return dofs_.extend(solve_dofs(omega, rhs, opt));
  }

  const FemMatrices& matrices() const { return matrices_; }
  const DofMap& dof_map() const { return dofs_; }
  const Grid& grid() const { return grid_; }

private:
  const Grid& grid_;
  DofMap dofs_;
  FemMatrices matrices_;
};

template <class Grid>
ComplexField solve_frequency(const MaterialField<Grid::dimension>& field, const Grid& grid, double omega,
                             const ComplexField& g, const SolveOptions& opt = {}) {
  return FrequencySolver<Grid>(field, grid).solve(omega, g, opt);
}

struct FrequencyRecord {
  double epsilon = 0.0;
  double omega = 0.0;
  double err_l2 = 0.0;
  double err_h1 = 0.0;
  double envelope = 0.0;  // e(ε, ω, d) (1 + ω^{-1/2})
  double source_norm = 0.0;  // ‖g‖_{L2(Ω)}
};

inline double frequency_envelope(double epsilon, double omega, int dimension) {
  return rate_frequency(epsilon, omega, dimension) * (1.0 + 1.0 / std::sqrt(omega));
}

/// ‖v_ε - v‖ on Omega \ B_{r_obs} at one frequency, with the envelope.
template <class Grid>
FrequencyRecord visibility_frequency(const FrequencySolver<Grid>& perturbed, const FrequencySolver<Grid>& homog,
                                     double epsilon, double omega, const ComplexField& g, double r_obs) {
  constexpr int D = Grid::dimension;
  if (!perturbed.grid().same_as(homog.grid())) throw std::invalid_argument("visibility_frequency: mismatched grids");
  if (!(r_obs > 4.0 * epsilon && r_obs <= 2.0))
    throw std::invalid_argument("visibility_frequency: r_obs must lie in (4 eps, 2]");
  const ComplexField ve = perturbed.solve(omega, g);
  const ComplexField v = homog.solve(omega, g);
  const NormPair n = field_norms(ComplexField(ve - v), perturbed.grid(), outside_ball<D>(r_obs));
  FrequencyRecord rec;
  rec.epsilon = epsilon;
  rec.omega = omega;
  rec.err_l2 = n.l2;
  rec.err_h1 = n.h1();
  rec.envelope = frequency_envelope(epsilon, omega, D);
  rec.source_norm = norm_L2(g, perturbed.grid(), everywhere<D>());
  return rec;
}

template <class Grid>
FrequencyRecord visibility_frequency(const MaterialField<Grid::dimension>& field_perturbed,
                                     const MaterialField<Grid::dimension>& field_homog, const Grid& grid,
                                     double epsilon, double omega, const ComplexField& g, double r_obs) {
  if (field_perturbed.size() != field_homog.size() || field_perturbed.size() != grid.cell_count())
    throw std::invalid_argument("visibility_frequency: mismatched grids");
  return visibility_frequency(FrequencySolver<Grid>(field_perturbed, grid), FrequencySolver<Grid>(field_homog, grid),
                              epsilon, omega, g, r_obs);
}

/// Radial profile on [1, R] with values and radial derivatives at the
/// integrator's accepted steps; evaluated by cubic Hermite interpolation.
struct RadialProfile {
  std::vector<double> radii;  // increasing
  std::vector<cplx> values;
  std::vector<cplx> slopes;

  cplx operator()(double r) const {
    if (r <= radii.front()) return values.front();
    if (r >= radii.back()) return values.back();
    const auto it = std::upper_bound(radii.begin(), radii.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - radii.begin()) - 1;
    const double h = radii[i + 1] - radii[i];
    const double t = (r - radii[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * values[i] + h10 * h * slopes[i] + h01 * values[i + 1] + h11 * h * slopes[i + 1];
  }
};

class IllConditioned : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Log-derivative v'/v at r of the outgoing kernel with wavenumber k:
/// e^{ikr}/r in 3D, H0(kr) in 2D.
inline cplx kernel_log_derivative(cplx k, double r, int dimension) {
  if (dimension == 3) return cplx(0.0, 1.0) * k - 1.0 / r;
  return -k * hankel1_h1(k * r) / hankel0_h1(k * r);
}

/// Solves v'' + (d-1)/r v' + i ω_s v = 0 on (1, R) with v(1) = boundary_value
/// and the exact outgoing Robin condition v'/v = (kernel log-derivative) at R,
/// where ω_s = ω ε² and k = e^{iπ/4} √ω_s.
///
/// The Robin data fixes the solution up to scale at R; it is integrated
/// inwards with adaptive Dormand-Prince (relative tolerance 1e-13), the
/// direction in which the decaying solution dominates, and rescaled to match
/// the value at r = 1.
inline RadialProfile solve_radial_exterior(double omega_scaled, cplx boundary_value, double r_max, int dimension) {
  namespace ode = boost::numeric::odeint;
  if (!(omega_scaled > 0.0)) throw std::invalid_argument("solve_radial_exterior: omega must be positive");
  if (!(r_max > 1.0)) throw std::invalid_argument("solve_radial_exterior: R_max must exceed 1");
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("solve_radial_exterior: dimension must be 2 or 3");

  const cplx k = std::polar(std::sqrt(omega_scaled), 0.25 * std::numbers::pi);
  using State = std::array<cplx, 2>;
  const double curvature = dimension - 1.0;
  const cplx shift(0.0, omega_scaled);
  auto rhs = [&](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = -curvature / r * y[1] - shift * y[0];
  };

  State y{cplx(1.0, 0.0), kernel_log_derivative(k, r_max, dimension)};
  std::vector<double> rs;
  std::vector<State> ys;
  auto observer = [&](const State& s, double r) {
    rs.push_back(r);
    ys.push_back(s);
  };
  auto stepper = ode::make_dense_output(1e-14, 1e-13, ode::runge_kutta_dopri5<State>());
  const double h0 = -std::min(1e-3, 0.01 * (r_max - 1.0));
  ode::integrate_adaptive(stepper, rhs, y, r_max, 1.0, h0, observer);

  const cplx at_one = ys.back()[0];
  if (rs.back() != 1.0 && std::abs(rs.back() - 1.0) > 1e-12)
    throw IllConditioned("solve_radial_exterior: integration did not reach r = 1");
  const double growth = std::abs(at_one);
  if (!(growth > 1e-250 && growth < 1e250))
    throw IllConditioned("solve_radial_exterior: profile under/overflows for this omega");

  const cplx scale = boundary_value / at_one;
  RadialProfile out;
  const std::size_t n = rs.size();
  out.radii.resize(n);
  out.values.resize(n);
  out.slopes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.radii[n - 1 - i] = rs[i];
    out.values[n - 1 - i] = scale * ys[i][0];
    out.slopes[n - 1 - i] = scale * ys[i][1];
  }
  out.radii.front() = 1.0;
  return out;
}

/// Closed-form exterior solution used as the reference:
/// b e^{ik(r-1)}/r in 3D and b H0(kr)/H0(k) in 2D.
inline cplx radial_exterior_exact(double omega_scaled, cplx boundary_value, double r, int dimension) {
  const cplx k = std::polar(std::sqrt(omega_scaled), 0.25 * std::numbers::pi);
  if (dimension == 3) return boundary_value * std::exp(cplx(0.0, 1.0) * k * (r - 1.0)) / r;
  return boundary_value * hankel0_h1(k * r) / hankel0_h1(k);
}

}  // namespace heatcloak
