#pragma once

// Rate fits of visibility errors against epsilon.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatcloak {

class DegenerateData : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class RateModel { power_law, log_reciprocal };

inline const char* to_string(RateModel m) { return m == RateModel::power_law ? "power-law" : "log-reciprocal"; }

inline RateModel parse_rate_model(const std::string& s) {
  if (s == "power-law" || s == "power_law") return RateModel::power_law;
  if (s == "log-reciprocal" || s == "log_reciprocal") return RateModel::log_reciprocal;
  throw std::invalid_argument("unknown rate model '" + s + "'");
}

struct RateFit {
  RateModel model = RateModel::power_law;
  /// power-law: slope b of log err = log C + b log eps.
  /// log-reciprocal: max/min of err |ln eps| over the points used.
  double value = 0.0;
  /// power-law: C. log-reciprocal: geometric mean of err |ln eps|.
  double constant = 0.0;
  /// RMS residual in the transformed (log) coordinates.
  double residual = 0.0;
  std::size_t used = 0;
  bool excluded_largest = false;

  /// Fitted envelope at eps.
  double envelope(double eps) const {
    return model == RateModel::power_law ? constant * std::pow(eps, value) : constant / std::abs(std::log(eps));
  }
};

/// Least-squares fit in transformed coordinates. With four or more points and
/// exclude_largest set, the largest epsilon is dropped as pre-asymptotic.
inline RateFit fit_rate(std::vector<double> eps, std::vector<double> err, RateModel model,
                        bool exclude_largest = true) {
  if (eps.size() != err.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (eps.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 records");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw std::invalid_argument("fit_rate: epsilon must lie in (0, 1)");
    if (!(err[i] > 0.0) || !std::isfinite(err[i]))
      throw DegenerateData("fit_rate: errors must be positive and finite (got " + std::to_string(err[i]) + ")");
  }
  RateFit fit;
  fit.model = model;
  if (exclude_largest && eps.size() >= 4) {
    const auto it = std::max_element(eps.begin(), eps.end());
    const auto k = it - eps.begin();
    eps.erase(eps.begin() + k);
    err.erase(err.begin() + k);
    fit.excluded_largest = true;
  }
  const std::size_t n = eps.size();
  fit.used = n;

  if (model == RateModel::power_law) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::log(eps[i]);
      y[i] = std::log(err[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateData("fit_rate: epsilon values must not all coincide");
    fit.value = sxy / sxx;
    const double a = my - fit.value * mx;
    fit.constant = std::exp(a);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - a - fit.value * x[i], 2);
    fit.residual = std::sqrt(ss / n);
  } else {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::log(err[i] * std::abs(std::log(eps[i])));
    const double mz = std::accumulate(z.begin(), z.end(), 0.0) / n;
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    fit.value = std::exp(*hi - *lo);
    fit.constant = std::exp(mz);
    double ss = 0.0;
    for (double v : z) ss += (v - mz) * (v - mz);
    fit.residual = std::sqrt(ss / n);
  }
  return fit;
}

}  // namespace heatcloak
