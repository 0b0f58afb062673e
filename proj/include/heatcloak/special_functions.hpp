#pragma once

// Hankel functions of the first kind (orders 0 and 1), the Helmholtz
// fundamental solutions, and the visibility envelopes e(eps, omega, d) and
// e(eps, d).

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace heatcloak {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.57721566490153286061;

class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), error_estimate(estimate) {}
  double error_estimate;
};

namespace detail {

inline void check_hankel_argument(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw DomainError("hankel: argument on the branch cut (-inf, 0]");
}

// Ascending series for J0, Y0, J1, Y1. Stops once terms drop below
// roundoff relative to the running sums.
struct BesselSeries {
  cplx j0, y0, j1, y1;
};

inline BesselSeries bessel_series(cplx z) {
  using std::numbers::pi;
  const cplx q = 0.25 * z * z;  // (z/2)^2
  const cplx half = 0.5 * z;

  // J0 and the harmonic-weighted sum entering Y0.
  cplx t0 = 1.0;  // (-q)^k / (k!)^2
  cplx j0 = 1.0;
  cplx s0 = 0.0;
  // J1 and the digamma-weighted sum entering Y1.
  cplx t1 = half;  // (-1)^k (z/2)^{2k+1} / (k!(k+1)!)
  cplx j1 = half;
  double harmonic = 0.0;                      // H_k
  cplx s1 = (-2.0 * euler_gamma + 1.0) * t1;  // psi(1)+psi(2) = -2g + 1
  for (int k = 1; k < 300; ++k) {
    const double dk = k;
    t0 *= -q / (dk * dk);
    t1 *= -q / (dk * (dk + 1.0));
    harmonic += 1.0 / dk;
    j0 += t0;
    j1 += t1;
    s0 -= harmonic * t0;  // (-1)^{k+1} H_k q^k/(k!)^2 = -H_k t0
    // psi(k+1) + psi(k+2) = -2g + 2 H_k + 1/(k+1)
    s1 += (-2.0 * euler_gamma + 2.0 * harmonic + 1.0 / (dk + 1.0)) * t1;
    const double scale = std::abs(j0) + std::abs(j1) + std::abs(s0) + 1e-300;
    if (std::abs(t0) + std::abs(t1) * (harmonic + 1.0) < 1e-18 * scale && dk > std::abs(half))
      break;
  }
  const cplx log_half = std::log(half);
  BesselSeries out;
  out.j0 = j0;
  out.j1 = j1;
  out.y0 = (2.0 / pi) * ((log_half + euler_gamma) * j0 + s0);
  out.y1 = (2.0 / pi) * j1 * log_half - 2.0 / (pi * z) - s1 / pi;
  return out;
}

// Hankel's large-argument expansion of H_nu^(1). The even and odd terms (the
// P and Q series) are each truncated at their smallest term, plus half of the
// first omitted one.
inline cplx hankel_asymptotic(int order, cplx z) {
  using std::numbers::pi;
  const double mu = 4.0 * order * order;
  const cplx i(0.0, 1.0);
  constexpr int max_terms = 80;
  std::array<cplx, max_terms> terms;
  terms[0] = 1.0;
  for (int k = 1; k < max_terms; ++k) {
    const double odd = 2.0 * k - 1.0;
    terms[k] = terms[k - 1] * i * (mu - odd * odd) / (k * 8.0 * z);
  }
  cplx sum = 0.0;
  for (int parity = 0; parity < 2; ++parity) {
    double last = std::numeric_limits<double>::infinity();
    int k = parity;
    for (; k < max_terms; k += 2) {
      const double mag = std::abs(terms[k]);
      if (mag > last) break;
      sum += terms[k];
      last = mag;
      if (mag < 1e-18 * std::abs(sum) || mag == 0.0) {
        k = max_terms;
        break;
      }
    }
    if (k < max_terms) sum += 0.5 * terms[k];
  }
  const cplx phase = std::exp(i * (z - 0.5 * order * pi - 0.25 * pi));
  return std::sqrt(2.0 / (pi * z)) * phase * sum;
}

inline constexpr double hankel_series_radius = 8.0;

}  // namespace detail

/// Hankel function of the first kind of order zero, principal branch.
///
/// Ascending series (J0 + iY0) for |z| <= 8, Hankel's asymptotic expansion
/// beyond. Throws DomainError for z on the cut (-inf, 0].
inline cplx hankel0_h1(cplx z) {
  detail::check_hankel_argument(z);
  if (std::abs(z) <= detail::hankel_series_radius) {
    const auto s = detail::bessel_series(z);
    return s.j0 + cplx(0.0, 1.0) * s.y0;
  }
  return detail::hankel_asymptotic(0, z);
}

/// Order-one companion, needed for the logarithmic derivative
/// d/dz H0(z) = -H1(z).
inline cplx hankel1_h1(cplx z) {
  detail::check_hankel_argument(z);
  if (std::abs(z) <= detail::hankel_series_radius) {
    const auto s = detail::bessel_series(z);
    return s.j1 + cplx(0.0, 1.0) * s.y1;
  }
  return detail::hankel_asymptotic(1, z);
}

// Regime-specific evaluators, exposed so the two regimes can be compared.
inline cplx hankel0_h1_series(cplx z) {
  detail::check_hankel_argument(z);
  const auto s = detail::bessel_series(z);
  return s.j0 + cplx(0.0, 1.0) * s.y0;
}

inline cplx hankel0_h1_asymptotic(cplx z) {
  detail::check_hankel_argument(z);
  return detail::hankel_asymptotic(0, z);
}

/// Outgoing 3D Helmholtz kernel e^{ikr} / (4 pi r).
inline cplx green3d(cplx k, double r) {
  if (!(r > 0.0)) throw DomainError("green3d: r must be positive");
  return std::exp(cplx(0.0, 1.0) * k * r) / (4.0 * std::numbers::pi * r);
}

/// Outgoing 2D Helmholtz kernel (i/4) H0(kr).
inline cplx green2d(cplx k, double r) {
  if (!(r > 0.0)) throw DomainError("green2d: r must be positive");
  return cplx(0.0, 0.25) * hankel0_h1(k * r);
}

/// Wavenumber of the scaled exterior problem  Δv + i ω ε² v = 0,
/// k = e^{iπ/4} ε √ω, so that Im k > 0.
inline cplx scaled_wavenumber(double epsilon, double omega) {
  return std::polar(epsilon * std::sqrt(omega), 0.25 * std::numbers::pi);
}

inline void check_rate_arguments(double epsilon, int dimension) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw DomainError("rate: epsilon must lie in (0, 1/2)");
  if (dimension != 2 && dimension != 3) throw DomainError("rate: dimension must be 2 or 3");
}

/// Frequency-domain envelope e(eps, omega, d).
///
/// d = 3: eps exp(-sqrt(omega)/4).
/// d = 2: exp(-sqrt(omega)/4)/|ln eps| for omega >= 1/2, and
///        |ln omega / ln(omega eps)| below (both logs negative there).
inline double rate_frequency(double epsilon, double omega, int dimension) {
  check_rate_arguments(epsilon, dimension);
  if (!(omega > 0.0)) throw DomainError("rate_frequency: omega must be positive");
  const double decay = std::exp(-0.25 * std::sqrt(omega));
  if (dimension == 3) return epsilon * decay;
  if (omega >= 0.5) return decay / std::abs(std::log(epsilon));
  return std::abs(std::log(omega) / std::log(omega * epsilon));
}

/// Time-domain envelope e(eps, d): eps in 3D, 1/|ln eps| in 2D.
inline double rate_time(double epsilon, int dimension) {
  check_rate_arguments(epsilon, dimension);
  return dimension == 3 ? epsilon : 1.0 / std::abs(std::log(epsilon));
}

/// ∫_0^∞ (1 + ω^{-1/2}) e(ε, ω, d) dω.
///
/// The singular weight is removed by ω = s²; [0, 1/2] is integrated with
/// adaptive Gauss-Kronrod and the exponential tail on [1/2, ∞) in closed form.
/// In 2D the head has a 1/ln s cusp at s = 0 and is integrated in t = -ln s.
inline double integrated_rate(double epsilon, int dimension, double tolerance = 1e-13) {
  check_rate_arguments(epsilon, dimension);
  const double s_split = std::sqrt(0.5);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  double head = 0.0;
  if (dimension == 3) {
    auto integrand = [&](double s) { return 2.0 * (s + 1.0) * rate_frequency(epsilon, s * s, 3); };
    head = GK::integrate(integrand, 0.0, s_split, 25, tolerance, &error);
  } else {
    auto integrand = [&](double t) {
      const double s = std::exp(-t);
      return s * s == 0.0 ? 0.0 : 2.0 * (s + 1.0) * s * rate_frequency(epsilon, s * s, 2);
    };
    head = GK::integrate(integrand, -std::log(s_split), std::numeric_limits<double>::infinity(), 25, tolerance,
                         &error);
  }
  if (!(error <= 1e3 * tolerance * std::max(1.0, std::abs(head))))
    throw QuadratureError("integrated_rate: quadrature did not converge", error);
  // 2 ∫_{s0}^∞ (s + 1) e^{-s/4} ds = 2 e^{-s0/4} (4 s0 + 20)
  const double tail_shape = 2.0 * std::exp(-0.25 * s_split) * (4.0 * s_split + 20.0);
  const double tail_scale = dimension == 3 ? epsilon : 1.0 / std::abs(std::log(epsilon));
  return head + tail_scale * tail_shape;
}

}  // namespace heatcloak
