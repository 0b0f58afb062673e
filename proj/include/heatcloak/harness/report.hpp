#pragma once

// CSV output, CSV input for refits, and the summary report.

#include "heatcloak/harness/rates.hpp"
#include "heatcloak/harness/sweep.hpp"
#include "heatcloak/heat_solver.hpp"
#include "heatcloak/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace heatcloak {

using SummaryJson = nlohmann::ordered_json;

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

/// time,normL2,normH1
inline void write_trace_csv(std::ostream& os, const VisibilityTrace& trace) {
  os << "time,normL2,normH1\n";
  for (const auto& s : trace.samples)
    os << format_number(s.time) << ',' << format_number(s.l2) << ',' << format_number(s.h1) << '\n';
}

/// epsilon,omega,errL2,errH1,envelope
inline void write_frequency_csv(std::ostream& os, const std::vector<VisibilityRecord>& records) {
  os << "epsilon,omega,errL2,errH1,envelope\n";
  for (const auto& r : records) {
    if (std::isnan(r.omega)) continue;
    os << format_number(r.epsilon) << ',' << format_number(r.omega) << ',' << format_number(r.err_l2) << ','
       << format_number(r.err_h1) << ',' << format_number(r.envelope) << '\n';
  }
}

/// epsilon,errL2,errH1,envelope with the sup over time per run.
inline void write_time_sup_csv(std::ostream& os, const std::vector<TimeRun>& runs, int dimension) {
  os << "epsilon,errL2,errH1,envelope\n";
  for (const auto& r : runs)
    os << format_number(r.epsilon) << ',' << format_number(r.trace.sup_l2) << ',' << format_number(r.trace.sup_h1)
       << ',' << format_number(rate_time(r.epsilon, dimension)) << '\n';
}

/// omega,errL2,errH1
inline void write_omega_samples_csv(std::ostream& os, const FrequencyIntegral& fi) {
  os << "omega,errL2,errH1\n";
  for (const auto& s : fi.samples)
    os << format_number(s.omega) << ',' << format_number(s.l2) << ',' << format_number(s.h1) << '\n';
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::invalid_argument("csv: missing column '" + name + "'");
  }
  bool has_column(const std::string& name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
};

/// Reads a numeric CSV with a header line.
inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  {
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) t.header.push_back(detail::trim(cell));
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(detail::parse_double(cell, "line " + std::to_string(lineno)));
    if (row.size() != t.header.size()) throw std::invalid_argument("csv: wrong field count on line " + std::to_string(lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline SummaryJson fit_json(const RateFit& f) {
  SummaryJson j;
  j["model"] = to_string(f.model);
  j[f.model == RateModel::power_law ? "slope" : "constancy_ratio"] = f.value;
  j["constant"] = f.constant;
  j["residual"] = f.residual;
  j["points_used"] = f.used;
  j["excluded_largest_epsilon"] = f.excluded_largest;
  return j;
}

/// Fits per omega group (or a single group without an omega column) from a
/// CSV with epsilon and errH1 columns.
inline SummaryJson rates_from_table(const CsvTable& t, RateModel model, bool exclude_largest = true) {
  const std::size_t ce = t.column("epsilon"), ch = t.column("errH1");
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> groups;
  const bool by_omega = t.has_column("omega");
  for (const auto& row : t.rows) {
    const double key = by_omega ? row[t.column("omega")] : -1.0;
    groups[key].first.push_back(row[ce]);
    groups[key].second.push_back(row[ch]);
  }
  SummaryJson out = SummaryJson::array();
  for (const auto& [w, pts] : groups) {
    SummaryJson j;
    if (by_omega) j["omega"] = w;
    try {
      j["fit"] = fit_json(fit_rate(pts.first, pts.second, model, exclude_largest));
    } catch (const std::exception& e) {
      j["error"] = e.what();
    }
    out.push_back(j);
  }
  return out;
}

/// Summary with fitted slopes, ratios and pass flags.
inline SummaryJson sweep_summary(const SweepConfig& cfg, const SweepResult& res) {
  SummaryJson s;
  s["mode"] = to_string(cfg.mode);
  s["dimension"] = cfg.dimension;
  s["medium"] = cfg.medium_tag();
  s["source"] = cfg.source_tag();
  s["h"] = cfg.h();
  s["records"] = res.records.size();
  s["failures"] = res.failures;
  s["rate_fit_note"] = "fits drop the largest epsilon when four or more are available";
  const RateModel model = predicted_model(cfg.dimension);
  SummaryJson fits = SummaryJson::array();
  bool rate_pass = true;
  auto add_fit = [&](double omega) {
    SummaryJson j;
    if (omega >= 0.0) j["omega"] = omega;
    const auto [e, v] = rate_points(res, omega);
    try {
      const RateFit pl = fit_rate(e, v, RateModel::power_law);
      j["power_law"] = fit_json(pl);
      if (model == RateModel::power_law) {
        j["pass"] = pl.value >= 0.8 && pl.value <= 1.2;
      } else {
        const RateFit lr = fit_rate(e, v, RateModel::log_reciprocal);
        j["log_reciprocal"] = fit_json(lr);
        j["pass"] = lr.value <= 2.0;
      }
    } catch (const std::exception& ex) {
      j["error"] = ex.what();
      j["pass"] = false;
    }
    rate_pass = rate_pass && j["pass"].get<bool>();
    fits.push_back(j);
  };
  if (cfg.mode == SweepMode::frequency) {
    for (double w : cfg.omegas) add_fit(w);
    if (cfg.omegas.size() >= 2) {
      const EnvelopeCalibration cal = calibrate_envelope(res.records);
      s["envelope"] = {{"anchor_omega", cal.anchor_omega},
                       {"constant", cal.constant},
                       {"worst_ratio", cal.worst_ratio},
                       {"pass", cal.holds}};
    }
  } else {
    add_fit(-1.0);
  }
  s["rate_fits"] = fits;
  s["rate_pass"] = rate_pass;
  s["pass"] = rate_pass && res.failures.empty() &&
              (!s.contains("envelope") || s["envelope"]["pass"].get<bool>());
  return s;
}

/// Writes the CSVs and summary.json into cfg.out_dir; returns the summary.
inline SummaryJson write_sweep_outputs(const SweepConfig& cfg, const SweepResult& res) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  if (cfg.mode == SweepMode::frequency) {
    std::ofstream f(dir / "frequency_records.csv");
    write_frequency_csv(f, res.records);
  } else {
    std::ofstream f(dir / "time_sup.csv");
    write_time_sup_csv(f, res.time_runs, cfg.dimension);
    for (const auto& run : res.time_runs) {
      std::ofstream t(dir / ("time_eps_" + format_number(run.epsilon) + ".csv"));
      write_trace_csv(t, run.trace);
    }
  }
  const SummaryJson s = sweep_summary(cfg, res);
  std::ofstream out(dir / "summary.json");
  out << s.dump(2) << '\n';
  return s;
}

}  // namespace heatcloak
