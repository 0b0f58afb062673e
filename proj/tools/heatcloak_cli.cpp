// heatcloak: command-line front end.
//
//   heatcloak time-run  -c run.cfg [--epsilon e] [--via-frequency]
//   heatcloak freq-run  -c run.cfg [--epsilon e]
//   heatcloak sweep     -c sweep.cfg
//   heatcloak validate  [--all | criterion ...]
//   heatcloak rates     --csv records.csv [--model power-law] [--keep-largest]
//
// Any config key can be overridden with --set key=value.

#include "heatcloak/harness/config.hpp"
#include "heatcloak/harness/report.hpp"
#include "heatcloak/harness/sweep.hpp"
#include "heatcloak/spectral.hpp"
#include "heatcloak/validation.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace heatcloak;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  double epsilon = -1.0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "override a config key (key=value)");
}

SweepConfig load_config(const CommonOptions& o, SweepMode mode) {
  KeyValueConfig kv = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  for (const auto& s : o.overrides) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    kv.set(detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
  if (!kv.has("mode")) kv.set("mode", to_string(mode));
  SweepConfig cfg = SweepConfig::from(kv);
  if (o.epsilon > 0.0) cfg.epsilons = {o.epsilon};
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const SweepConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / name);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(cfg.out_dir) / name).string());
  return f;
}

template <int D>
void frequency_pipeline(const SweepConfig& cfg, double eps) {
  const auto grid = heatcloak::detail::sweep_grid<D>(cfg, eps);
  const auto src = heatcloak::detail::sweep_source<D>(cfg);
  const auto mp = heatcloak::detail::sweep_medium<D>(cfg, eps, grid);
  const auto mh = homogeneous_medium(grid);
  const RealField u0 = RealField::Zero(grid.node_count());
  const OmegaGrid omegas = OmegaGrid::composite();
  SynthesisOptions opt;
  const int n_times = 20;
  for (int i = 1; i <= n_times; ++i) opt.times.push_back(cfg.t_final * i / n_times);
  const FrequencyIntegral fi = visibility_via_frequency_integral(mp, mh, grid, src, u0, omegas, cfg.r_obs, opt);
  const VisibilityTrace tr = synthesized_visibility(mp, mh, grid, src, u0, omegas, cfg.r_obs, opt);
  const std::string tag = format_number(eps);
  auto a = open_output(cfg, "omega_samples_eps_" + tag + ".csv");
  write_omega_samples_csv(a, fi);
  auto b = open_output(cfg, "synthesized_eps_" + tag + ".csv");
  write_trace_csv(b, tr);
  std::cout << "epsilon " << tag << ": integrated bound L2 " << format_number(fi.bound_l2) << ", H1 "
            << format_number(fi.bound_h1) << "; synthesized sup L2 " << format_number(tr.sup_l2) << ", H1 "
            << format_number(tr.sup_h1) << '\n';
}

int time_run(const CommonOptions& o, bool via_frequency) {
  const SweepConfig cfg = load_config(o, SweepMode::time);
  if (cfg.mode != SweepMode::time) throw ConfigError("time-run: mode must be 'time'");
  const SweepResult res = run_sweep(cfg);
  for (const auto& run : res.time_runs) {
    auto f = open_output(cfg, "time_eps_" + format_number(run.epsilon) + ".csv");
    write_trace_csv(f, run.trace);
    std::cout << "epsilon " << format_number(run.epsilon) << ": sup L2 " << format_number(run.trace.sup_l2)
              << ", sup H1 " << format_number(run.trace.sup_h1) << '\n';
  }
  if (via_frequency)
    for (double eps : cfg.epsilons) cfg.dimension == 2 ? frequency_pipeline<2>(cfg, eps) : frequency_pipeline<3>(cfg, eps);
  for (const auto& f : res.failures) std::cerr << "failed: " << f << '\n';
  return res.failures.empty() ? 0 : 1;
}

int freq_run(const CommonOptions& o) {
  const SweepConfig cfg = load_config(o, SweepMode::frequency);
  if (cfg.mode != SweepMode::frequency) throw ConfigError("freq-run: mode must be 'frequency'");
  const SweepResult res = run_sweep(cfg);
  auto f = open_output(cfg, "frequency_records.csv");
  write_frequency_csv(f, res.records);
  write_frequency_csv(std::cout, res.records);
  for (const auto& e : res.failures) std::cerr << "failed: " << e << '\n';
  return res.failures.empty() ? 0 : 1;
}

int sweep(const CommonOptions& o) {
  const SweepConfig cfg = load_config(o, SweepMode::frequency);
  const SweepResult res = run_sweep(cfg);
  const SummaryJson s = write_sweep_outputs(cfg, res);
  std::cout << s.dump(2) << '\n';
  return s["pass"].get<bool>() ? 0 : 1;
}

int validate(bool all, const std::vector<std::string>& ids) {
  namespace hv = heatcloak::validation;
  using Check = std::vector<hv::CheckLine> (*)();
  const std::vector<std::pair<std::string, Check>> checks{
      {"1", hv::rate_3d},          {"2", hv::rate_2d},
      {"3", hv::frequency_envelope}, {"4", hv::exterior_decay},
      {"5", hv::change_of_variables}, {"6", hv::pipeline_equivalence},
      {"7", hv::special_functions_check}, {"8-3d", hv::object_independence_3d},
      {"8-2d", hv::object_independence_2d}, {"9", hv::solver_bedrock},
  };
  const std::vector<std::string> quick{"1", "4", "7", "9"};
  const std::vector<std::string>& wanted = !ids.empty() ? ids : quick;
  bool ok = true;
  for (const auto& [id, fn] : checks) {
    if (!all && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    for (const auto& line : fn()) {
      std::cout << hv::format_line(line) << std::endl;
      if (!line.informational) ok = ok && line.pass;
    }
  }
  return ok ? 0 : 1;
}

int rates(const std::string& path, const std::string& model, bool keep_largest) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const CsvTable t = read_csv(in);
  std::cout << rates_from_table(t, parse_rate_model(model), !keep_largest).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-equation cloaking simulations and visibility-rate checks"};
  app.require_subcommand(1);

  CommonOptions time_opts, freq_opts, sweep_opts;
  bool via_frequency = false;
  auto* t = app.add_subcommand("time-run", "time-domain visibility traces, one CSV per epsilon");
  add_common(t, time_opts);
  t->add_option("--epsilon", time_opts.epsilon, "run a single epsilon");
  t->add_flag("--via-frequency", via_frequency, "also synthesize the traces through the frequency pipeline");

  auto* f = app.add_subcommand("freq-run", "frequency-domain exterior errors per (epsilon, omega)");
  add_common(f, freq_opts);
  f->add_option("--epsilon", freq_opts.epsilon, "run a single epsilon");

  auto* s = app.add_subcommand("sweep", "full sweep with CSVs and summary.json");
  add_common(s, sweep_opts);

  bool all = false;
  std::vector<std::string> ids;
  auto* v = app.add_subcommand("validate", "oracle and acceptance checks (default: the fast ones)");
  v->add_flag("--all", all, "run every check, including the long 2D ones");
  v->add_option("criteria", ids, "criterion ids: 1 2 3 4 5 6 7 8-3d 8-2d 9");

  std::string csv, model = "power-law";
  bool keep_largest = false;
  auto* r = app.add_subcommand("rates", "fit rates from an existing CSV");
  r->add_option("--csv", csv, "CSV with epsilon and errH1 columns")->required();
  r->add_option("--model", model, "power-law or log-reciprocal");
  r->add_flag("--keep-largest", keep_largest, "do not drop the largest epsilon");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*t) return time_run(time_opts, via_frequency);
    if (*f) return freq_run(freq_opts);
    if (*s) return sweep(sweep_opts);
    if (*v) return validate(all, ids);
    if (*r) return rates(csv, model, keep_largest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
