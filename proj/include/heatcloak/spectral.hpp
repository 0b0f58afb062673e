#pragma once

// Time Fourier transform with kernel (1/√(2π)) ∫ s(t) e^{ikt} dt, per-frequency
// solves and inverse synthesis of time-domain fields.
//
// A transformed field û solves (K - iωM_rho) û = ŝ(ω) M_1 g + M_rho u0/√(2π).
// Synthesis subtracts the two large-ω leading terms, whose inverses are known
// in closed form:
//   u0/(√(2π)(β - iω))   <->  u0 e^{-βt}
//   ŝ(ω) z/(β - iω)      <->  z (s * e^{-β·})(t),    z = M_rho^{-1} M_1 g,
// and integrates the O(ω^{-2}) remainder with piecewise-linear Filon weights.

#include "heatcloak/fem.hpp"
#include "heatcloak/grid.hpp"
#include "heatcloak/heat_solver.hpp"
#include "heatcloak/helmholtz_solver.hpp"
#include "heatcloak/medium.hpp"
#include "heatcloak/parallel.hpp"
#include "heatcloak/sparse.hpp"

#include <unsupported/Eigen/FFT>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heatcloak {

inline const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

class TruncationError : public std::runtime_error {
public:
  TruncationError(const std::string& what, double estimate) : std::runtime_error(what), estimate(estimate) {}
  double estimate;
};

/// Uniform samples s(n dt), n = 0..N-1, of a causal signal.
struct TimeSignal {
  double dt = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t n) const { return static_cast<double>(n) * dt; }
};

/// Samples s on [0, T] with spacing dt. The t = 0 sample is halved, the
/// mean of the zero extension and s(0+).
inline TimeSignal sample_causal(const std::function<double(double)>& s, double t_final, double dt) {
  const TimeGrid tg = TimeGrid::with_dt(t_final, dt);
  TimeSignal sig{dt, std::vector<double>(static_cast<std::size_t>(tg.steps) + 1)};
  for (int n = 0; n <= tg.steps; ++n) sig.samples[n] = s(tg.time(n));
  sig.samples[0] *= 0.5;
  return sig;
}

/// Values on k_m = 2π m'/(N dt) in FFT order (m' = m for m < N/2, else m - N).
struct FrequencySamples {
  double dt = 0.0;
  std::vector<double> k;
  std::vector<cplx> values;
  double dk() const { return 2.0 * std::numbers::pi / (static_cast<double>(values.size()) * dt); }
};

/// ŝ(k_m) ≈ (dt/√(2π)) Σ_n s_n e^{i k_m t_n}.
inline FrequencySamples time_to_frequency(const TimeSignal& sig) {
  if (sig.samples.empty()) throw std::invalid_argument("time_to_frequency: empty signal");
  if (!(sig.dt > 0.0)) throw std::invalid_argument("time_to_frequency: dt must be positive");
  const std::size_t n = sig.size();
  std::vector<cplx> in(sig.samples.begin(), sig.samples.end()), out;
  Eigen::FFT<double> fft;
  fft.inv(out, in);  // (1/N) Σ in_j e^{+2πi jm/N}
  FrequencySamples fs;
  fs.dt = sig.dt;
  fs.values.resize(n);
  fs.k.resize(n);
  const double scale = static_cast<double>(n) * sig.dt * inv_sqrt_2pi;
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * sig.dt);
  for (std::size_t m = 0; m < n; ++m) {
    fs.values[m] = scale * out[m];
    const double mm = m < (n + 1) / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
    fs.k[m] = mm * dk;
  }
  return fs;
}

/// Exact discrete inverse of time_to_frequency; returns the real part.
inline TimeSignal frequency_to_time(const FrequencySamples& fs) {
  if (fs.values.empty()) throw std::invalid_argument("frequency_to_time: empty spectrum");
  std::vector<cplx> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, fs.values);
  TimeSignal sig{fs.dt, std::vector<double>(out.size())};
  const double scale = fs.dk() * inv_sqrt_2pi;
  for (std::size_t n = 0; n < out.size(); ++n) sig.samples[n] = scale * out[n].real();
  return sig;
}

/// Weights (W_a, W_b) with ∫_a^b p(ω) e^{iθω} dω = W_a p(a) + W_b p(b) for
/// linear p.
inline std::pair<cplx, cplx> filon_weights(double a, double b, double theta) {
  const double len = b - a;
  const double phi = theta * len;
  cplx i0, i1;  // ∫_0^1 e^{iφτ} dτ and ∫_0^1 τ e^{iφτ} dτ
  if (std::abs(phi) < 0.5) {
    cplx term(1.0, 0.0);
    double fact = 1.0;
    for (int n = 0; n < 14; ++n) {
      if (n > 0) {
        term *= cplx(0.0, phi);
        fact *= n;
      }
      i0 += term / (fact * (n + 1));
      i1 += term / (fact * (n + 2));
    }
  } else {
    const cplx e = std::exp(cplx(0.0, phi));
    i0 = (e - 1.0) / cplx(0.0, phi);
    i1 = e / cplx(0.0, phi) + (e - 1.0) / (phi * phi);
  }
  const cplx phase = len * std::exp(cplx(0.0, theta * a));
  return {phase * (i0 - i1), phase * i1};
}

/// ŝ(k) of the piecewise-linear interpolant of the samples.
inline cplx fourier_at(const TimeSignal& sig, double k) {
  if (sig.samples.empty()) throw std::invalid_argument("fourier_at: empty signal");
  // The halved first sample stands for the jump; undo it for the interpolant.
  cplx acc = 0.0;
  for (std::size_t n = 0; n + 1 < sig.size(); ++n) {
    const double a = sig.time(n);
    const auto [wa, wb] = filon_weights(a, a + sig.dt, k);
    const double sa = n == 0 ? 2.0 * sig.samples[0] : sig.samples[n];
    acc += wa * sa + wb * sig.samples[n + 1];
  }
  return inv_sqrt_2pi * acc;
}

namespace spectrum {
/// Transform of 1_{[0, T]}.
inline std::function<cplx(double)> indicator(double t_end) {
  return [t_end](double w) -> cplx {
    if (std::abs(w * t_end) < 1e-8) return inv_sqrt_2pi * t_end;
    return inv_sqrt_2pi * (std::exp(cplx(0.0, w * t_end)) - 1.0) / cplx(0.0, w);
  };
}
/// Transform of e^{-rate t} 1_{t > 0}.
inline std::function<cplx(double)> decaying_exponential(double rate = 1.0) {
  return [rate](double w) { return inv_sqrt_2pi / cplx(rate, -w); };
}
}  // namespace spectrum

/// Frequency nodes for ∫_0^{ω_max}.
struct OmegaGrid {
  std::vector<double> nodes;

  /// Linear spacing on [0, linear_end], then geometric with per_decade points
  /// per decade up to omega_max; steps never exceed max_step.
  static OmegaGrid composite(double omega_max = 256.0, double linear_step = 0.02, double linear_end = 1.0,
                             int per_decade = 80, double max_step = std::numeric_limits<double>::infinity()) {
    if (!(omega_max > 0.0) || !(linear_step > 0.0) || !(linear_end > 0.0) || per_decade < 1 || !(max_step > 0.0))
      throw std::invalid_argument("OmegaGrid: invalid parameters");
    OmegaGrid g;
    const double end = std::min(linear_end, omega_max);
    const int n_lin = static_cast<int>(std::ceil(end / linear_step - 1e-9));
    for (int i = 0; i < n_lin; ++i) g.nodes.push_back(end * i / n_lin);
    g.nodes.push_back(end);
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    while (g.nodes.back() < omega_max * (1.0 - 1e-12)) {
      const double w = g.nodes.back();
      const double next = std::min({w * ratio, w + max_step, omega_max});
      g.nodes.push_back(next);
    }
    return g;
  }

  /// {2^j : j = j_min .. j_max}.
  static OmegaGrid dyadic(int j_min = -4, int j_max = 8) {
    OmegaGrid g;
    for (int j = j_min; j <= j_max; ++j) g.nodes.push_back(std::ldexp(1.0, j));
    return g;
  }

  double max() const { return nodes.back(); }
};

struct SynthesisOptions {
  std::vector<double> times;
  /// ŝ(ω); when empty it is computed from the sampled envelope on [0, horizon].
  std::function<cplx(double)> spectrum;
  double horizon = 40.0;
  double sample_dt = 1e-3;
  double beta = 1.0;
  /// Relative tolerance for the ω-truncation estimate; violations throw.
  double truncation_tolerance = std::numeric_limits<double>::infinity();
  /// Threads over ω samples; 1 runs serially, 0 uses every hardware thread.
  unsigned workers = 1;
};

struct SynthesisResult {
  TimeSeriesField field;
  double truncation_estimate = 0.0;  // max-norm estimate of ∫_{ω_max}^∞
};

namespace detail {

// ŝ on the grid, from the option or the sampled envelope.
template <int D>
std::vector<cplx> envelope_spectrum(const SourceSpec<D>& src, const OmegaGrid& grid, const SynthesisOptions& opt) {
  std::vector<cplx> out(grid.nodes.size());
  if (opt.spectrum) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = opt.spectrum(grid.nodes[j]);
    return out;
  }
  const TimeSignal sig = sample_causal(src.envelope, opt.horizon, opt.sample_dt);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = fourier_at(sig, grid.nodes[j]);
  return out;
}

// (s * e^{-β·})(t).
inline double damped_convolution(const std::function<double(double)>& s, double beta, double t) {
  if (t <= 0.0) return 0.0;
  auto f = [&](double tau) { return s(tau) * std::exp(-beta * (t - tau)); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 20, 1e-12);
}

// Per-medium data shared by all frequencies.
template <class Grid>
struct TransformedProblem {
  const FrequencySolver<Grid>& solver;
  Vector<double> load;     // M_1 g
  Vector<double> initial;  // M_rho u0 / √(2π)

  TransformedProblem(const FrequencySolver<Grid>& fs, const RealField& g, const RealField& u0)
      : solver(fs), load(load_vector(fs.grid(), fs.dof_map(), g)),
        initial(inv_sqrt_2pi * (fs.matrices().mass * fs.dof_map().restrict(u0))) {}

  Vector<cplx> solve(double omega, cplx s_hat) const {
    const Vector<cplx> rhs = s_hat * load.cast<cplx>() + initial.cast<cplx>();
    return solver.solve_dofs(omega, rhs);
  }
};

template <int D>
void require_separable(const SourceSpec<D>& src) {
  if (src.general) throw std::invalid_argument("spectral pipeline: only separable sources s(t) g(x) are supported");
  if (!src.envelope || !src.profile) throw std::invalid_argument("spectral pipeline: source needs profile and envelope");
}

}  // namespace detail

/// Time-domain solution at opt.times synthesized from frequency solves on
/// the ω grid (which must start at 0). Real fields by conjugate symmetry:
/// u(t) = (2/√(2π)) Re ∫_0^∞ û(ω) e^{-iωt} dω.
template <class Grid>
SynthesisResult synthesize_time_solution(const MaterialField<Grid::dimension>& field, const Grid& grid,
                                         const SourceSpec<Grid::dimension>& src, const RealField& u0,
                                         const OmegaGrid& omegas, const SynthesisOptions& opt) {
  detail::require_separable(src);
  if (omegas.nodes.size() < 2 || omegas.nodes.front() != 0.0)
    throw std::invalid_argument("synthesize_time_solution: omega grid must start at 0 and have two nodes");
  if (u0.size() != static_cast<Eigen::Index>(grid.node_count()))
    throw std::invalid_argument("synthesize_time_solution: u0 must have one value per node");

  const FrequencySolver<Grid> fs(field, grid);
  const DofMap& dofs = fs.dof_map();
  const RealField g = source_profile(grid, src);
  const detail::TransformedProblem<Grid> prob(fs, g, u0);
  const Vector<double> z = SparseLdlt<double>(fs.matrices().mass).solve(prob.load);
  const Vector<double> u0d = dofs.restrict(u0);
  const std::vector<cplx> s_hat = detail::envelope_spectrum(src, omegas, opt);

  const auto rem = parallel_map(
      omegas.nodes.size(),
      [&](std::size_t j) {
        const double w = omegas.nodes[j];
        const Vector<cplx> u_hat = prob.solve(w, s_hat[j]);
        const cplx lead = 1.0 / cplx(opt.beta, -w);
        return Vector<cplx>(u_hat - lead * (inv_sqrt_2pi * u0d + s_hat[j] * z).cast<cplx>());
      },
      opt.workers);

  SynthesisResult res;
  res.field.stride = 0;
  double peak = 0.0;
  for (double t : opt.times) {
    Vector<cplx> acc = Vector<cplx>::Zero(dofs.size());
    for (std::size_t j = 0; j + 1 < omegas.nodes.size(); ++j) {
      const auto [wa, wb] = filon_weights(omegas.nodes[j], omegas.nodes[j + 1], -t);
      acc += wa * rem[j] + wb * rem[j + 1];
    }
    const double conv = detail::damped_convolution(src.envelope, opt.beta, t);
    const Vector<double> ud = std::exp(-opt.beta * t) * u0d + conv * z + 2.0 * inv_sqrt_2pi * acc.real();
    res.field.times.push_back(t);
    res.field.snapshots.push_back(dofs.extend(ud));
    peak = std::max(peak, ud.cwiseAbs().maxCoeff());
  }
  res.truncation_estimate = 2.0 * inv_sqrt_2pi * omegas.max() * rem.back().cwiseAbs().maxCoeff();
  if (res.truncation_estimate > opt.truncation_tolerance * peak) {
    std::ostringstream msg;
    msg << "synthesize_time_solution: truncation estimate " << res.truncation_estimate << " exceeds "
        << opt.truncation_tolerance << " x peak " << peak << " at omega_max = " << omegas.max();
    throw TruncationError(msg.str(), res.truncation_estimate);
  }
  return res;
}

struct FrequencyErrorSample {
  double omega;
  double l2;
  double h1;
};

struct FrequencyIntegral {
  std::vector<FrequencyErrorSample> samples;
  double bound_l2 = 0.0;  // (2/√(2π)) ∫ ‖v̂_ε - v̂‖_{L2(Ω∖B_r)} dω
  double bound_h1 = 0.0;
};

/// Integrates per-frequency exterior error norms of the transformed
/// difference over the ω grid by the trapezoidal rule. By Minkowski's
/// inequality bound_l2 majorizes sup_t ‖u_ε(t) - u(t)‖_{L2(Ω∖B_r)} up to the
/// truncation of the ω range.
template <class Grid>
FrequencyIntegral visibility_via_frequency_integral(const MaterialField<Grid::dimension>& field_perturbed,
                                                    const MaterialField<Grid::dimension>& field_homog,
                                                    const Grid& grid, const SourceSpec<Grid::dimension>& src,
                                                    const RealField& u0, const OmegaGrid& omegas, double r_obs,
                                                    const SynthesisOptions& opt = {}) {
  constexpr int D = Grid::dimension;
  detail::require_separable(src);
  if (omegas.nodes.size() < 2) throw std::invalid_argument("visibility_via_frequency_integral: need two nodes");
  const FrequencySolver<Grid> fp(field_perturbed, grid), fh(field_homog, grid);
  const RealField g = source_profile(grid, src);
  const detail::TransformedProblem<Grid> pp(fp, g, u0), ph(fh, g, u0);
  const std::vector<cplx> s_hat = detail::envelope_spectrum(src, omegas, opt);
  const auto region = outside_ball<D>(r_obs);

  FrequencyIntegral out;
  out.samples = parallel_map(
      omegas.nodes.size(),
      [&](std::size_t j) {
        const double w = omegas.nodes[j];
        const ComplexField diff = fp.dof_map().extend(Vector<cplx>(pp.solve(w, s_hat[j]) - ph.solve(w, s_hat[j])));
        const NormPair n = field_norms(diff, grid, region);
        return FrequencyErrorSample{w, n.l2, n.h1()};
      },
      opt.workers);
  for (std::size_t j = 0; j + 1 < out.samples.size(); ++j) {
    const double dw = out.samples[j + 1].omega - out.samples[j].omega;
    out.bound_l2 += 0.5 * dw * (out.samples[j].l2 + out.samples[j + 1].l2);
    out.bound_h1 += 0.5 * dw * (out.samples[j].h1 + out.samples[j + 1].h1);
  }
  out.bound_l2 *= 2.0 * inv_sqrt_2pi;
  out.bound_h1 *= 2.0 * inv_sqrt_2pi;
  return out;
}

/// Visibility curve t -> ‖u_ε(t) - u(t)‖ on Ω∖B_r from two syntheses.
template <class Grid>
VisibilityTrace synthesized_visibility(const MaterialField<Grid::dimension>& field_perturbed,
                                       const MaterialField<Grid::dimension>& field_homog, const Grid& grid,
                                       const SourceSpec<Grid::dimension>& src, const RealField& u0,
                                       const OmegaGrid& omegas, double r_obs, const SynthesisOptions& opt) {
  constexpr int D = Grid::dimension;
  const SynthesisResult a = synthesize_time_solution(field_perturbed, grid, src, u0, omegas, opt);
  const SynthesisResult b = synthesize_time_solution(field_homog, grid, src, u0, omegas, opt);
  const auto region = outside_ball<D>(r_obs);
  VisibilityTrace trace;
  for (std::size_t i = 0; i < a.field.times.size(); ++i) {
    const NormPair n = field_norms(RealField(a.field.snapshots[i] - b.field.snapshots[i]), grid, region);
    trace.samples.push_back({a.field.times[i], n.l2, n.h1()});
    trace.sup_l2 = std::max(trace.sup_l2, n.l2);
    trace.sup_h1 = std::max(trace.sup_h1, n.h1());
  }
  return trace;
}

}  // namespace heatcloak
