#pragma once

// Epsilon / omega sweeps of exterior visibility, with rate fits.

#include "heatcloak/harness/config.hpp"
#include "heatcloak/harness/rates.hpp"
#include "heatcloak/heat_solver.hpp"
#include "heatcloak/helmholtz_solver.hpp"
#include "heatcloak/medium.hpp"
#include "heatcloak/parallel.hpp"
#include "heatcloak/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace heatcloak {

enum class SweepMode { frequency, time };
/// homogeneous: the reference medium on both sides, a control run.
enum class MediumKind { blownup, cloak, homogeneous };

inline const char* to_string(SweepMode m) { return m == SweepMode::frequency ? "frequency" : "time"; }
inline const char* to_string(MediumKind m) {
  switch (m) {
    case MediumKind::blownup: return "blownup";
    case MediumKind::cloak: return "cloak";
    default: return "homogeneous";
  }
}

struct SweepConfig {
  int dimension = 3;
  SweepMode mode = SweepMode::frequency;
  MediumKind medium = MediumKind::blownup;
  std::vector<double> epsilons{0.02, 0.04, 0.08, 0.16};
  std::vector<double> omegas{1.0};
  /// 2D: cells per axis on [-L, L]². 3D: radial cells per unit length away
  /// from the refined breakpoints.
  int nx = 100;
  double domain = 4.0;  // L: half width (2D) or outer radius (3D)
  double t_final = 1.0;
  double dt = 0.02;
  TimeScheme scheme = TimeScheme::implicit_euler;
  double object_tensor = 2.0;  // a_O = c I
  double object_density = 3.0;
  std::vector<double> source_center{3.0, 0.0};  // 3D uses its norm as the shell radius
  double source_width = 0.3;
  std::string source_envelope = "indicator";  // or "exponential"
  double r_obs = 2.0;
  std::string out_dir = "out";
  unsigned workers = 0;

  double h() const { return dimension == 2 ? 2.0 * domain / nx : 1.0 / nx; }

  template <int D>
  ObjectSpec<D> object() const {
    const double bound = std::max({2.0, object_tensor, 1.0 / object_tensor});
    return ObjectSpec<D>::constant(object_tensor, object_density, bound);
  }

  std::function<double(double)> envelope_fn() const {
    if (source_envelope == "indicator") return envelope::indicator(t_final);
    if (source_envelope == "exponential") return envelope::decaying_exponential(1.0);
    throw ConfigError("sweep: source.envelope must be 'indicator' or 'exponential'");
  }

  std::string medium_tag() const {
    std::ostringstream os;
    os << to_string(medium) << "(a=" << object_tensor << ",rho=" << object_density << ")";
    return os.str();
  }

  std::string source_tag() const {
    std::ostringstream os;
    os << "gaussian(r=" << source_radius() << ",w=" << source_width << "," << source_envelope << ")";
    return os.str();
  }

  double source_radius() const {
    double s = 0.0;
    for (double c : source_center) s += c * c;
    return std::sqrt(s);
  }

  void validate() const {
    if (dimension != 2 && dimension != 3) throw ConfigError("sweep: dimension must be 2 or 3");
    if (epsilons.empty()) throw ConfigError("sweep: epsilons must not be empty");
    for (double e : epsilons)
      if (!(e > 0.0 && e < 0.5)) throw ConfigError("sweep: every epsilon must lie in (0, 1/2)");
    if (!(r_obs >= 2.0)) throw ConfigError("sweep: r_obs must be at least 2");
    if (mode == SweepMode::frequency) {
      if (omegas.empty()) throw ConfigError("sweep: omegas must not be empty in frequency mode");
      for (double w : omegas)
        if (!(w > 0.0)) throw ConfigError("sweep: omegas must be positive");
      if (r_obs > 2.0) throw ConfigError("sweep: frequency visibility needs r_obs in (4 eps, 2]");
    } else {
      if (!(t_final > 0.0) || !(dt > 0.0)) throw ConfigError("sweep: t_final and dt must be positive");
      try {
        TimeGrid::with_dt(t_final, dt);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sweep: ") + e.what());
      }
    }
    if (nx < 4) throw ConfigError("sweep: nx must be at least 4");
    if (!(domain > r_obs)) throw ConfigError("sweep: domain must extend beyond r_obs");
    if (dimension == 2 && source_center.size() != 2) throw ConfigError("sweep: source.center needs 2 values in 2D");
    if (!(source_radius() > 2.0 && source_radius() < domain))
      throw ConfigError("sweep: source center must lie outside B_2 and inside the domain");
    if (!(source_width > 0.0)) throw ConfigError("sweep: source.width must be positive");
    if (!(object_tensor > 0.0) || !(object_density > 0.0))
      throw ConfigError("sweep: object coefficients must be positive");
    if (dimension == 2 && medium == MediumKind::blownup) {
      const double eps_min = *std::min_element(epsilons.begin(), epsilons.end());
      if (eps_min < 8.0 * h() * (1.0 - 1e-12))
        throw ConfigError("sweep: 2D blown-up runs need eps_min >= 8h to resolve B_eps");
    }
    envelope_fn();
  }

  static SweepConfig from(const KeyValueConfig& kv) {
    SweepConfig c;
    c.dimension = kv.integer("dimension", c.dimension);
    const std::string mode = kv.text("mode", to_string(c.mode));
    if (mode == "frequency") c.mode = SweepMode::frequency;
    else if (mode == "time") c.mode = SweepMode::time;
    else throw ConfigError("sweep: mode must be 'frequency' or 'time'");
    const std::string med = kv.text("medium", to_string(c.medium));
    if (med == "blownup") c.medium = MediumKind::blownup;
    else if (med == "cloak") c.medium = MediumKind::cloak;
    else if (med == "homogeneous") c.medium = MediumKind::homogeneous;
    else throw ConfigError("sweep: medium must be 'blownup', 'cloak' or 'homogeneous'");
    c.epsilons = kv.numbers("epsilons", c.epsilons);
    c.omegas = kv.numbers("omegas", c.omegas);
    c.nx = kv.integer("nx", c.nx);
    c.domain = kv.number("domain", c.domain);
    c.t_final = kv.number("t_final", c.t_final);
    c.dt = kv.number("dt", c.dt);
    const std::string scheme = kv.text("scheme", "implicit-euler");
    if (scheme == "implicit-euler") c.scheme = TimeScheme::implicit_euler;
    else if (scheme == "crank-nicolson") c.scheme = TimeScheme::crank_nicolson;
    else throw ConfigError("sweep: scheme must be 'implicit-euler' or 'crank-nicolson'");
    c.object_tensor = kv.number("object.tensor", c.object_tensor);
    c.object_density = kv.number("object.density", c.object_density);
    c.source_center = kv.numbers("source.center", c.source_center);
    c.source_width = kv.number("source.width", c.source_width);
    c.source_envelope = kv.text("source.envelope", c.source_envelope);
    c.r_obs = kv.number("r_obs", c.r_obs);
    c.out_dir = kv.text("out_dir", c.out_dir);
    c.workers = static_cast<unsigned>(kv.integer("workers", 0));
    if (const auto extra = kv.unused_keys(); !extra.empty()) throw ConfigError("sweep: unknown key '" + extra.front() + "'");
    if (c.dimension == 3 && kv.has("source.center") && c.source_center.size() == 2) c.source_center.push_back(0.0);
    return c;
  }
};

/// One (eps, omega) or (eps, t) point.
struct VisibilityRecord {
  double epsilon = 0.0;
  double omega = std::numeric_limits<double>::quiet_NaN();
  double time = std::numeric_limits<double>::quiet_NaN();
  double err_l2 = 0.0;
  double err_h1 = 0.0;
  double envelope = 0.0;
  double source_norm = 0.0;
  std::string medium;
  std::string source;
};

struct TimeRun {
  double epsilon = 0.0;
  VisibilityTrace trace;
};

struct SweepResult {
  std::vector<VisibilityRecord> records;
  std::vector<TimeRun> time_runs;  // time mode only
  std::vector<std::string> failures;
};

namespace detail {

template <int D>
auto sweep_grid(const SweepConfig& cfg, double eps) {
  if constexpr (D == 2) {
    (void)eps;
    return Grid2D::square(-cfg.domain, cfg.domain, cfg.nx);
  } else {
    return RadialGrid<3>::graded(cfg.domain, {eps, 1.0, 2.0}, cfg.h());
  }
}

template <int D>
SourceSpec<D> sweep_source(const SweepConfig& cfg) {
  if constexpr (D == 2) {
    Point<2> c(cfg.source_center[0], cfg.source_center[1]);
    return SourceSpec<2>::gaussian(c, cfg.source_width, cfg.envelope_fn());
  } else {
    return gaussian_shell<3>(cfg.source_radius(), cfg.source_width, cfg.envelope_fn());
  }
}

template <int D, class Grid>
MaterialField<D> sweep_medium(const SweepConfig& cfg, double eps, const Grid& grid) {
  if (cfg.medium == MediumKind::homogeneous) return homogeneous_medium(grid);
  const BlowupMap<D> map(eps);
  return cfg.medium == MediumKind::blownup ? assemble_blownup_medium(map, cfg.template object<D>(), grid)
                                           : assemble_cloak_medium(map, cfg.template object<D>(), grid);
}

template <int D>
std::vector<VisibilityRecord> frequency_point(const SweepConfig& cfg, double eps) {
  const auto grid = sweep_grid<D>(cfg, eps);
  using Grid = std::decay_t<decltype(grid)>;
  const ComplexField g = source_profile(grid, sweep_source<D>(cfg)).template cast<cplx>();
  const FrequencySolver<Grid> fp(sweep_medium<D>(cfg, eps, grid), grid);
  const FrequencySolver<Grid> fh(homogeneous_medium(grid), grid);
  std::vector<VisibilityRecord> out;
  for (double w : cfg.omegas) {
    const FrequencyRecord fr = visibility_frequency(fp, fh, eps, w, g, cfg.r_obs);
    VisibilityRecord r;
    r.epsilon = eps;
    r.omega = w;
    r.err_l2 = fr.err_l2;
    r.err_h1 = fr.err_h1;
    r.envelope = fr.envelope;
    r.source_norm = fr.source_norm;
    r.medium = cfg.medium_tag();
    r.source = cfg.source_tag();
    out.push_back(r);
  }
  return out;
}

template <int D>
TimeRun time_point(const SweepConfig& cfg, double eps) {
  const auto grid = sweep_grid<D>(cfg, eps);
  const auto src = sweep_source<D>(cfg);
  const RealField u0 = RealField::Zero(grid.node_count());
  TimeRun run;
  run.epsilon = eps;
  run.trace = visibility_time_domain(sweep_medium<D>(cfg, eps, grid), homogeneous_medium(grid), grid,
                                     TimeGrid::with_dt(cfg.t_final, cfg.dt), src, u0, cfg.r_obs, cfg.scheme);
  return run;
}

struct PointOutcome {
  std::vector<VisibilityRecord> records;
  std::optional<TimeRun> run;
  std::string failure;
};

}  // namespace detail

/// Runs every sweep point. A failing point is recorded in `failures` and the
/// sweep continues; output order follows the configured epsilon order.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  auto outcomes = parallel_map(
      cfg.epsilons.size(),
      [&](std::size_t i) {
        detail::PointOutcome o;
        const double eps = cfg.epsilons[i];
        try {
          if (cfg.mode == SweepMode::frequency) {
            o.records = cfg.dimension == 2 ? detail::frequency_point<2>(cfg, eps) : detail::frequency_point<3>(cfg, eps);
          } else {
            o.run = cfg.dimension == 2 ? detail::time_point<2>(cfg, eps) : detail::time_point<3>(cfg, eps);
            for (const auto& s : o.run->trace.samples) {
              VisibilityRecord r;
              r.epsilon = eps;
              r.time = s.time;
              r.err_l2 = s.l2;
              r.err_h1 = s.h1;
              r.envelope = rate_time(eps, cfg.dimension);
              r.medium = cfg.medium_tag();
              r.source = cfg.source_tag();
              o.records.push_back(r);
            }
          }
        } catch (const std::exception& e) {
          std::ostringstream msg;
          msg << "epsilon = " << eps << ": " << e.what();
          o.failure = msg.str();
        }
        return o;
      },
      cfg.workers);

  SweepResult res;
  for (auto& o : outcomes) {
    res.records.insert(res.records.end(), o.records.begin(), o.records.end());
    if (o.run) res.time_runs.push_back(std::move(*o.run));
    if (!o.failure.empty()) res.failures.push_back(o.failure);
  }
  return res;
}

/// Rate model predicted for the dimension: power law in 3D, 1/|ln eps| in 2D.
inline RateModel predicted_model(int dimension) {
  return dimension == 3 ? RateModel::power_law : RateModel::log_reciprocal;
}

/// (eps, errH1) pairs: per omega in frequency mode (omega < 0 selects the
/// time-mode sup over t).
inline std::pair<std::vector<double>, std::vector<double>> rate_points(const SweepResult& res, double omega) {
  std::map<double, double> best;
  for (const auto& r : res.records) {
    if (omega < 0.0) {
      if (!std::isnan(r.omega)) continue;
      best[r.epsilon] = std::max(best[r.epsilon], r.err_h1);
    } else if (r.omega == omega) {
      best[r.epsilon] = r.err_h1;
    }
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& [e, v] : best) {
    out.first.push_back(e);
    out.second.push_back(v);
  }
  return out;
}

struct EnvelopeCalibration {
  double anchor_omega = 0.0;
  double constant = 0.0;      // max over eps of errH1 / (envelope ‖g‖) at the anchor
  double worst_ratio = 0.0;   // max over the other points of errH1 / (C envelope ‖g‖)
  bool holds = false;
};

/// Calibrates C at the smallest omega and checks
/// errH1 <= C e(eps, omega, d)(1 + omega^{-1/2}) ‖g‖ at every other point.
inline EnvelopeCalibration calibrate_envelope(const std::vector<VisibilityRecord>& records) {
  EnvelopeCalibration cal;
  cal.anchor_omega = std::numeric_limits<double>::infinity();
  for (const auto& r : records)
    if (!std::isnan(r.omega)) cal.anchor_omega = std::min(cal.anchor_omega, r.omega);
  if (!std::isfinite(cal.anchor_omega)) throw std::invalid_argument("calibrate_envelope: no frequency records");
  for (const auto& r : records)
    if (r.omega == cal.anchor_omega) cal.constant = std::max(cal.constant, r.err_h1 / (r.envelope * r.source_norm));
  for (const auto& r : records)
    if (!std::isnan(r.omega) && r.omega != cal.anchor_omega)
      cal.worst_ratio = std::max(cal.worst_ratio, r.err_h1 / (cal.constant * r.envelope * r.source_norm));
  cal.holds = cal.constant > 0.0 && cal.worst_ratio <= 1.0;
  return cal;
}

struct ObjectIndependenceReport {
  SweepResult first, second;
  RateFit fit_first, fit_second;
  double slope_difference = 0.0;       // power-law slopes
  double envelope_divergence = 0.0;    // max_eps |E1 - E2| / max(E1, E2) of the fitted envelopes
  bool second_below_first_envelope = false;
};

/// Runs the same sweep for two objects and compares the fitted rates. The
/// sweep must produce one error per epsilon (a single omega, or time mode).
inline ObjectIndependenceReport object_independence_check(SweepConfig cfg, double tensor_a, double density_a,
                                                          double tensor_b, double density_b) {
  if (cfg.mode == SweepMode::frequency && cfg.omegas.size() != 1)
    throw std::invalid_argument("object_independence_check: use a single omega");
  ObjectIndependenceReport rep;
  cfg.object_tensor = tensor_a;
  cfg.object_density = density_a;
  rep.first = run_sweep(cfg);
  cfg.object_tensor = tensor_b;
  cfg.object_density = density_b;
  rep.second = run_sweep(cfg);
  const double omega = cfg.mode == SweepMode::frequency ? cfg.omegas.front() : -1.0;
  const auto [e1, v1] = rate_points(rep.first, omega);
  const auto [e2, v2] = rate_points(rep.second, omega);
  rep.fit_first = fit_rate(e1, v1, RateModel::power_law);
  rep.fit_second = fit_rate(e2, v2, RateModel::power_law);
  rep.slope_difference = std::abs(rep.fit_first.value - rep.fit_second.value);
  const RateModel model = predicted_model(cfg.dimension);
  const RateFit m1 = fit_rate(e1, v1, model), m2 = fit_rate(e2, v2, model);
  double worst = 0.0, c_first = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) c_first = std::max(c_first, v1[i] / rate_time(e1[i], cfg.dimension));
  bool below = true;
  for (std::size_t i = 0; i < e2.size(); ++i) {
    const double a = m1.envelope(e2[i]), b = m2.envelope(e2[i]);
    worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    below = below && v2[i] <= c_first * rate_time(e2[i], cfg.dimension);
  }
  rep.envelope_divergence = worst;
  rep.second_below_first_envelope = below;
  return rep;
}

}  // namespace heatcloak
