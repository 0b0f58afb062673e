#include "heatcloak/harness/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace heatcloak;

namespace {

SweepConfig small_radial_sweep() {
  SweepConfig c;
  c.dimension = 3;
  c.epsilons = {0.02, 0.04, 0.08, 0.16};
  c.omegas = {1.0};
  c.nx = 50;
  c.source_center = {3.0, 0.0, 0.0};
  c.workers = 1;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("heatcloak_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesValuesCommentsAndLists) {
  const auto kv = KeyValueConfig::parse_string(
      "# sweep\n"
      "dimension = 2   # planar\n"
      "\n"
      "epsilons = 0.1, 0.05 0.025\n"
      "out_dir = results/run 1\n");
  EXPECT_EQ(kv.integer("dimension"), 2);
  EXPECT_EQ(kv.numbers("epsilons"), (std::vector<double>{0.1, 0.05, 0.025}));
  EXPECT_EQ(kv.text("out_dir"), "results/run 1");
  EXPECT_EQ(kv.number("nx", 64.0), 64.0);
  EXPECT_TRUE(kv.unused_keys().empty());
}

TEST(Config, Errors) {
  EXPECT_THROW(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse_string("just words\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse_string(" = 3\n"), ConfigError);
  const auto kv = KeyValueConfig::parse_string("nx = 12.5\nt_final = soon\n");
  EXPECT_THROW(kv.integer("nx"), ConfigError);
  EXPECT_THROW(kv.number("t_final"), ConfigError);
  EXPECT_THROW(kv.text("missing"), ConfigError);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/heatcloak.cfg"), ConfigError);
}

TEST(SweepConfig, FromKeyValues) {
  const auto kv = KeyValueConfig::parse_string(
      "dimension = 3\nepsilons = 0.01, 0.02\nomegas = 1, 4\nnx = 80\nobject.tensor = 100\nobject.density = 0.1\n"
      "source.center = 3, 0\nsource.width = 0.25\nr_obs = 2\nt_final = 2\ndt = 0.01\nout_dir = o\n");
  const SweepConfig c = SweepConfig::from(kv);
  EXPECT_EQ(c.dimension, 3);
  EXPECT_EQ(c.epsilons, (std::vector<double>{0.01, 0.02}));
  EXPECT_EQ(c.omegas, (std::vector<double>{1.0, 4.0}));
  EXPECT_EQ(c.nx, 80);
  EXPECT_EQ(c.object_tensor, 100.0);
  EXPECT_EQ(c.object_density, 0.1);
  EXPECT_EQ(c.source_center.size(), 3u);
  EXPECT_EQ(c.source_width, 0.25);
  EXPECT_EQ(c.t_final, 2.0);
  EXPECT_EQ(c.out_dir, "o");
  EXPECT_NO_THROW(c.validate());
}

TEST(SweepConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(SweepConfig::from(KeyValueConfig::parse_string("dimensions = 3\n")), ConfigError);
  auto bad = [](const std::string& text) { SweepConfig::from(KeyValueConfig::parse_string(text)).validate(); };
  EXPECT_THROW(bad("dimension = 4\n"), ConfigError);
  EXPECT_THROW(bad("epsilons = 0.5\n"), ConfigError);
  EXPECT_THROW(bad("r_obs = 1.5\n"), ConfigError);
  EXPECT_THROW(bad("omegas = 0\n"), ConfigError);
  EXPECT_THROW(bad("mode = time\nt_final = 1\ndt = 0.3\n"), ConfigError);
  EXPECT_THROW(bad("source.center = 1, 0, 0\n"), ConfigError);
  EXPECT_THROW(bad("dimension = 2\nsource.center = 3, 0\nepsilons = 0.05\nnx = 64\n"), ConfigError);
  EXPECT_THROW(bad("medium = glass\n"), ConfigError);
}

TEST(FitRate, ExactPowerLaw) {
  const std::vector<double> e{0.01, 0.02, 0.04, 0.08};
  std::vector<double> v;
  for (double x : e) v.push_back(0.7 * x);
  const RateFit f = fit_rate(e, v, RateModel::power_law, false);
  EXPECT_NEAR(f.value, 1.0, 1e-10);
  EXPECT_NEAR(f.constant, 0.7, 1e-10);
  EXPECT_NEAR(f.envelope(0.03), 0.021, 1e-12);
}

TEST(FitRate, ExactLogReciprocal) {
  const std::vector<double> e{0.001, 0.01, 0.1};
  std::vector<double> v;
  for (double x : e) v.push_back(1.0 / std::abs(std::log(x)));
  const RateFit f = fit_rate(e, v, RateModel::log_reciprocal);
  EXPECT_NEAR(f.value, 1.0, 1e-12);
  EXPECT_NEAR(f.constant, 1.0, 1e-12);
}

TEST(FitRate, ExcludesLargestWithFourPoints) {
  const std::vector<double> e{0.02, 0.04, 0.08, 0.4};
  const std::vector<double> v{0.02, 0.04, 0.08, 9.0};
  const RateFit f = fit_rate(e, v, RateModel::power_law);
  EXPECT_TRUE(f.excluded_largest);
  EXPECT_EQ(f.used, 3u);
  EXPECT_NEAR(f.value, 1.0, 1e-12);
  EXPECT_FALSE(fit_rate(e, v, RateModel::power_law, false).excluded_largest);
}

TEST(FitRate, DegenerateInputs) {
  EXPECT_THROW(fit_rate({0.1, 0.2}, {1.0, 2.0}, RateModel::power_law), std::invalid_argument);
  EXPECT_THROW(fit_rate({0.1, 0.2, 0.3}, {1.0, 0.0, 2.0}, RateModel::power_law), DegenerateData);
  EXPECT_THROW(fit_rate({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}, RateModel::power_law), DegenerateData);
  EXPECT_THROW(fit_rate({0.1, 0.2, 1.5}, {1.0, 2.0, 3.0}, RateModel::power_law), std::invalid_argument);
  EXPECT_THROW(fit_rate({0.1, 0.2}, {1.0}, RateModel::power_law), std::invalid_argument);
}

TEST(Sweep, SingletonWithIdenticalMediaGivesZeroRecords) {
  SweepConfig c = small_radial_sweep();
  c.medium = MediumKind::homogeneous;
  c.epsilons = {0.1};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(r.records[0].err_l2, 0.0);
  EXPECT_EQ(r.records[0].err_h1, 0.0);

  c.mode = SweepMode::time;
  c.t_final = 0.2;
  c.dt = 0.05;
  const SweepResult t = run_sweep(c);
  ASSERT_EQ(t.records.size(), 5u);
  for (const auto& rec : t.records) EXPECT_EQ(rec.err_h1, 0.0);
}

TEST(Sweep, EnvelopeColumnsMatchRateFunctions) {
  SweepConfig c = small_radial_sweep();
  c.omegas = {0.25, 1.0, 16.0};
  for (const auto& r : run_sweep(c).records)
    EXPECT_EQ(r.envelope, rate_frequency(r.epsilon, r.omega, 3) * (1.0 + 1.0 / std::sqrt(r.omega)));
  c.mode = SweepMode::time;
  c.t_final = 0.1;
  c.dt = 0.05;
  for (const auto& r : run_sweep(c).records) EXPECT_EQ(r.envelope, rate_time(r.epsilon, 3));
}

TEST(Sweep, OutputsAreDeterministic) {
  SweepConfig c = small_radial_sweep();
  c.omegas = {1.0, 4.0};
  const auto a = scratch("det_a"), b = scratch("det_b");
  c.out_dir = a.string();
  write_sweep_outputs(c, run_sweep(c));
  c.out_dir = b.string();
  c.workers = 2;
  write_sweep_outputs(c, run_sweep(c));
  for (const char* f : {"frequency_records.csv", "summary.json"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Sweep, InvalidEpsilonRejectedBeforeRunning) {
  SweepConfig c = small_radial_sweep();
  c.epsilons = {0.6, 0.05, 0.1};
  EXPECT_THROW(run_sweep(c), ConfigError);
}

TEST(Sweep, RefinementStabilityOf3DSlope) {
  SweepConfig c = small_radial_sweep();
  const auto slope = [&](int nx) {
    c.nx = nx;
    const auto [e, v] = rate_points(run_sweep(c), 1.0);
    return fit_rate(e, v, RateModel::power_law).value;
  };
  const double coarse = slope(50), fine = slope(100);
  EXPECT_NEAR(coarse, fine, 0.05);
  EXPECT_NEAR(fine, 1.0, 0.2);
}

TEST(Sweep, EnvelopeDominates3DErrorsAtFixedEpsilon) {
  SweepConfig c = small_radial_sweep();
  c.epsilons = {0.05};
  c.omegas = {0.25, 1.0, 4.0, 16.0, 64.0};
  const EnvelopeCalibration cal = calibrate_envelope(run_sweep(c).records);
  EXPECT_EQ(cal.anchor_omega, 0.25);
  EXPECT_GT(cal.constant, 0.0);
  EXPECT_TRUE(cal.holds) << cal.worst_ratio;
}

TEST(Sweep, TwoDimensionalRateOnRadialShell) {
  // Radially symmetric 2D problem: a shell source around B_2, sup over t.
  std::vector<double> e{0.02, 0.04, 0.08}, v;
  for (double eps : e) {
    const auto g = RadialGrid<2>::graded(4.0, {eps, 1.0, 2.0}, 0.01);
    const auto m = assemble_blownup_medium(BlowupMap<2>(eps), ObjectSpec<2>::standard(), g);
    v.push_back(visibility_time_domain(m, homogeneous_medium(g), g, TimeGrid::with_dt(1.0, 0.02),
                                       gaussian_shell<2>(3.0, 0.3, envelope::indicator(1.0)),
                                       RealField::Zero(g.node_count()), 2.0)
                    .sup_h1);
  }
  EXPECT_LE(fit_rate(e, v, RateModel::log_reciprocal).value, 2.0);
}

TEST(ObjectIndependence, IdenticalObjectsGiveIdenticalRecords) {
  const ObjectIndependenceReport rep = object_independence_check(small_radial_sweep(), 2.0, 3.0, 2.0, 3.0);
  ASSERT_EQ(rep.first.records.size(), rep.second.records.size());
  for (std::size_t i = 0; i < rep.first.records.size(); ++i)
    EXPECT_EQ(rep.first.records[i].err_h1, rep.second.records[i].err_h1);
  EXPECT_EQ(rep.slope_difference, 0.0);
  EXPECT_EQ(rep.envelope_divergence, 0.0);
}

TEST(ObjectIndependence, DensityContrastSlopes) {
  SweepConfig c = small_radial_sweep();
  c.epsilons = {0.0025, 0.005, 0.01, 0.02};
  const ObjectIndependenceReport rep = object_independence_check(c, 2.0, 3.0, 2.0, 0.1);
  EXPECT_LE(rep.slope_difference, 0.2);
}

TEST(ObjectIndependence, TensorContrastShareEnvelopeNearEps005) {
  SweepConfig c = small_radial_sweep();
  c.epsilons = {0.025, 0.05, 0.1};
  const ObjectIndependenceReport rep = object_independence_check(c, 2.0, 3.0, 100.0, 3.0);
  EXPECT_LE(rep.envelope_divergence, 0.05);
  EXPECT_LE(rep.slope_difference, 0.2);
}

TEST(Report, RatesFromTableGroupsByOmega) {
  std::istringstream in(
      "epsilon,omega,errL2,errH1,envelope\n"
      "0.01,1,0,0.007,0\n0.02,1,0,0.014,0\n0.04,1,0,0.028,0\n"
      "0.01,4,0,1e-4,0\n0.02,4,0,4e-4,0\n0.04,4,0,1.6e-3,0\n");
  const CsvTable t = read_csv(in);
  const SummaryJson j = rates_from_table(t, RateModel::power_law);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["omega"].get<double>(), 1.0);
  EXPECT_NEAR(j[0]["fit"]["slope"].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(j[1]["fit"]["slope"].get<double>(), 2.0, 1e-10);
}

TEST(Report, CsvErrors) {
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), std::invalid_argument);
  std::istringstream ragged("epsilon,errH1\n0.1\n");
  EXPECT_THROW(read_csv(ragged), std::invalid_argument);
  std::istringstream ok("epsilon,errL2\n0.1,1\n");
  EXPECT_THROW(read_csv(ok).column("errH1"), std::invalid_argument);
}

TEST(Report, SummaryJsonForFrequencySweep) {
  SweepConfig c = small_radial_sweep();
  c.omegas = {1.0, 4.0};
  const SummaryJson s = sweep_summary(c, run_sweep(c));
  EXPECT_EQ(s["mode"], "frequency");
  EXPECT_EQ(s["records"].get<std::size_t>(), 8u);
  ASSERT_EQ(s["rate_fits"].size(), 2u);
  EXPECT_TRUE(s["rate_fits"][0]["power_law"]["excluded_largest_epsilon"].get<bool>());
  EXPECT_TRUE(s["rate_fits"][0]["pass"].get<bool>());
  EXPECT_TRUE(s.contains("envelope"));
  EXPECT_EQ(s["pass"].get<bool>(), s["rate_pass"].get<bool>() && s["envelope"]["pass"].get<bool>());
}

TEST(Report, TraceCsv) {
  VisibilityTrace tr;
  tr.samples = {{0.0, 0.0, 0.0}, {0.5, 0.25, 1.5}};
  std::ostringstream os;
  write_trace_csv(os, tr);
  EXPECT_EQ(os.str(), "time,normL2,normH1\n0,0,0\n0.5,0.25,1.5\n");
}
