#pragma once

// Time-domain solver for  ∂t(rho u) - div(A grad u) = f  in Omega, u = 0 on
// the boundary, u(0) = u0, by the theta scheme on the Galerkin system
//   (M/dt + θK) u^{n+1} = (M/dt - (1-θ)K) u^n + θ F^{n+1} + (1-θ) F^n.

#include "heatcloak/fem.hpp"
#include "heatcloak/grid.hpp"
#include "heatcloak/medium.hpp"
#include "heatcloak/sparse.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace heatcloak {

enum class TimeScheme { implicit_euler, crank_nicolson };

struct TimeGrid {
  double t_final;
  double dt;
  int steps;

  static TimeGrid with_steps(double t_final, int steps) {
    if (!(t_final > 0.0) || steps < 1) throw std::invalid_argument("TimeGrid: need T > 0 and steps >= 1");
    return {t_final, t_final / steps, steps};
  }

  /// Rounds T/dt to the nearest integer and requires dt * steps = T to 1e-12.
  static TimeGrid with_dt(double t_final, double dt) {
    if (!(t_final > 0.0) || !(dt > 0.0)) throw std::invalid_argument("TimeGrid: need T > 0 and dt > 0");
    const int steps = static_cast<int>(std::lround(t_final / dt));
    if (steps < 1 || std::abs(steps * dt - t_final) > 1e-12 * std::max(1.0, t_final))
      throw std::invalid_argument("TimeGrid: T must be an integer multiple of dt");
    return {t_final, dt, steps};
  }

  double time(int n) const { return n == steps ? t_final : n * dt; }
};

/// Envelopes s(t) for separable sources s(t) g(x).
namespace envelope {
inline std::function<double(double)> indicator(double t_end) {
  return [t_end](double t) { return (t >= 0.0 && t <= t_end) ? 1.0 : 0.0; };
}
inline std::function<double(double)> decaying_exponential(double rate = 1.0) {
  return [rate](double t) { return t >= 0.0 ? std::exp(-rate * t) : 0.0; };
}
}  // namespace envelope

/// Separable source s(t) g(x), or a general f(t, x) when `general` is set.
/// Nodal values of g (and f) are zeroed at nodes with |x| <= support_radius,
/// which keeps the support outside B_2 by default; 0 disables the mask.
template <int D>
struct SourceSpec {
  std::function<double(const Point<D>&)> profile;
  std::function<double(double)> envelope;
  double support_radius = 2.0;
  std::function<double(double, const Point<D>&)> general;

  /// exp(-|x - c|² / (2 w²)). On radial grids only |c| matters (a shell).
  static SourceSpec gaussian(const Point<D>& center, double width, std::function<double(double)> env) {
    SourceSpec s;
    s.profile = [center, width](const Point<D>& x) {
      return std::exp(-(x - center).squaredNorm() / (2.0 * width * width));
    };
    s.envelope = std::move(env);
    return s;
  }

  static SourceSpec none() {
    SourceSpec s;
    s.profile = [](const Point<D>&) { return 0.0; };
    s.envelope = [](double) { return 0.0; };
    return s;
  }

  bool masked(const Point<D>& x) const { return support_radius > 0.0 && x.norm() <= support_radius; }
};

/// Radially symmetric Gaussian shell exp(-(|x| - r_c)² / (2 w²)) for radial grids.
template <int D>
SourceSpec<D> gaussian_shell(double center_radius, double width, std::function<double(double)> env) {
  SourceSpec<D> s;
  s.profile = [center_radius, width](const Point<D>& x) {
    const double d = x.norm() - center_radius;
    return std::exp(-d * d / (2.0 * width * width));
  };
  s.envelope = std::move(env);
  return s;
}

/// Nodal values of the spatial profile with the support mask applied.
template <class Grid>
RealField source_profile(const Grid& grid, const SourceSpec<Grid::dimension>& src) {
  RealField g(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const auto x = grid.node(n);
    g[n] = src.masked(x) ? 0.0 : src.profile(x);
  }
  return g;
}

struct TimeSeriesField {
  std::vector<double> times;
  std::vector<RealField> snapshots;
  int stride = 1;
};

/// One time march. Holds the factored left-hand side; advance with step().
template <class Grid>
class HeatMarch {
public:
  static constexpr int D = Grid::dimension;

  HeatMarch(const MaterialField<D>& field, const Grid& grid, const TimeGrid& tg, SourceSpec<D> src,
            const RealField& u0, TimeScheme scheme = TimeScheme::implicit_euler)
      : grid_(grid), dofs_(grid), tg_(tg), src_(std::move(src)),
        theta_(scheme == TimeScheme::implicit_euler ? 1.0 : 0.5) {
    if (u0.size() != static_cast<Eigen::Index>(grid.node_count()))
      throw std::invalid_argument("HeatMarch: u0 must have one value per node");
    if (!u0.allFinite()) throw std::invalid_argument("HeatMarch: u0 must be finite");
    const FemMatrices fm = assemble_matrices(field, grid, dofs_);
    stiffness_ = fm.stiffness;
    mass_ = fm.mass;
    CsrMatrix<double> lhs = mass_ / tg_.dt + theta_ * stiffness_;
    lhs.makeCompressed();
    lhs_.factor(lhs);
    if (!src_.general) load_ = load_vector(grid_, dofs_, source_profile(grid_, src_));
    u_ = dofs_.restrict(u0);
  }

  void step() {
    const double t0 = tg_.time(n_), t1 = tg_.time(n_ + 1);
    Vector<double> rhs = mass_ * u_ / tg_.dt;
    if (theta_ < 1.0) rhs -= (1.0 - theta_) * (stiffness_ * u_);
    rhs += theta_ * forcing(t1);
    if (theta_ < 1.0) rhs += (1.0 - theta_) * forcing(t0);
    u_ = lhs_.solve(rhs);
    ++n_;
  }

  int step_index() const { return n_; }
  double time() const { return tg_.time(n_); }
  bool done() const { return n_ >= tg_.steps; }

  RealField nodal() const { return dofs_.extend(u_); }
  const Vector<double>& dofs() const { return u_; }

  /// ∫ rho u² for the current state.
  double weighted_energy() const { return u_.dot(mass_ * u_); }

  const DofMap& dof_map() const { return dofs_; }

private:
  Vector<double> forcing(double t) const {
    if (!src_.general) return src_.envelope(t) * load_;
    RealField f(grid_.node_count());
    for (std::size_t n = 0; n < grid_.node_count(); ++n) {
      const auto x = grid_.node(n);
      f[n] = src_.masked(x) ? 0.0 : src_.general(t, x);
    }
    return load_vector(grid_, dofs_, f);
  }

  const Grid& grid_;
  DofMap dofs_;
  TimeGrid tg_;
  SourceSpec<D> src_;
  double theta_;
  CsrMatrix<double> stiffness_, mass_;
  SparseLdlt<double> lhs_;
  Vector<double> load_;
  Vector<double> u_;
  int n_ = 0;
};

/// Marches to T, storing a snapshot every `stride` steps (and at t = 0).
template <class Grid>
TimeSeriesField solve_parabolic(const MaterialField<Grid::dimension>& field, const Grid& grid, const TimeGrid& tg,
                                const SourceSpec<Grid::dimension>& src, const RealField& u0,
                                TimeScheme scheme = TimeScheme::implicit_euler, int stride = 1) {
  if (stride < 1) throw std::invalid_argument("solve_parabolic: stride must be positive");
  HeatMarch<Grid> march(field, grid, tg, src, u0, scheme);
  TimeSeriesField out;
  out.stride = stride;
  out.times.push_back(0.0);
  out.snapshots.push_back(march.nodal());
  while (!march.done()) {
    march.step();
    if (march.step_index() % stride == 0) {
      out.times.push_back(march.time());
      out.snapshots.push_back(march.nodal());
    }
  }
  return out;
}

struct VisibilitySample {
  double time;
  double l2;
  double h1;
};

struct VisibilityTrace {
  std::vector<VisibilitySample> samples;
  double sup_l2 = 0.0;
  double sup_h1 = 0.0;
};

/// Marches the cloaked (or blown-up) and homogeneous problems side by side
/// and records ‖u_c(t) - u(t)‖ on Omega \ B_{r_obs} after every step.
template <class Grid>
VisibilityTrace visibility_time_domain(const MaterialField<Grid::dimension>& field_cloak,
                                       const MaterialField<Grid::dimension>& field_homog, const Grid& grid,
                                       const TimeGrid& tg, const SourceSpec<Grid::dimension>& src,
                                       const RealField& u0, double r_obs,
                                       TimeScheme scheme = TimeScheme::implicit_euler) {
  constexpr int D = Grid::dimension;
  if (field_cloak.size() != field_homog.size() || field_cloak.size() != grid.cell_count())
    throw std::invalid_argument("visibility_time_domain: mismatched grids");
  if (!(r_obs >= 2.0)) throw std::invalid_argument("visibility_time_domain: r_obs must be at least 2");
  HeatMarch<Grid> cloak(field_cloak, grid, tg, src, u0, scheme);
  HeatMarch<Grid> homog(field_homog, grid, tg, src, u0, scheme);
  const auto region = outside_ball<D>(r_obs);
  VisibilityTrace trace;
  auto record = [&] {
    const RealField diff = cloak.nodal() - homog.nodal();
    const NormPair n = field_norms(diff, grid, region);
    trace.samples.push_back({cloak.time(), n.l2, n.h1()});
    trace.sup_l2 = std::max(trace.sup_l2, n.l2);
    trace.sup_h1 = std::max(trace.sup_h1, n.h1());
  };
  record();
  while (!cloak.done()) {
    cloak.step();
    homog.step();
    record();
  }
  return trace;
}

}  // namespace heatcloak
