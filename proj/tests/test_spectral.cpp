#include "heatcloak/spectral.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace heatcloak;

namespace {
constexpr double pi = std::numbers::pi;

cplx exp_transform(double k) { return 1.0 / (std::sqrt(2.0 * pi) * cplx(1.0, -k)); }

RealField sine_mode(const Grid2D& g) {
  return interpolate(g, [](const Point<2>& p) { return std::sin(pi * p[0]) * std::sin(pi * p[1]); });
}

struct RadialCase {
  explicit RadialCase(double eps = 0.1) : eps(eps) {}
  double eps;
  RadialGrid<3> grid = RadialGrid<3>::graded(4.0, {eps, 1.0, 2.0}, 0.02);
  SourceSpec<3> src = gaussian_shell<3>(3.0, 0.3, envelope::decaying_exponential(1.0));
  MaterialField<3> cloak = assemble_blownup_medium(BlowupMap<3>(eps), ObjectSpec<3>::standard(), grid);
  MaterialField<3> homog = homogeneous_medium(grid);
  RealField u0 = RealField::Zero(grid.node_count());

  SynthesisOptions options() const {
    SynthesisOptions opt;
    opt.spectrum = spectrum::decaying_exponential(1.0);
    return opt;
  }
};
}  // namespace

TEST(TimeToFrequency, ZeroSignal) {
  const TimeSignal sig = sample_causal([](double) { return 0.0; }, 1.0, 0.01);
  for (const cplx& v : time_to_frequency(sig).values) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(TimeToFrequency, DecayingExponential) {
  const TimeSignal sig = sample_causal([](double t) { return std::exp(-t); }, 40.0, 1e-3);
  const FrequencySamples fs = time_to_frequency(sig);
  for (double target : {0.0, 1.0, 5.0}) {
    std::size_t best = 0;
    for (std::size_t m = 0; m < fs.k.size(); ++m)
      if (std::abs(fs.k[m] - target) < std::abs(fs.k[best] - target)) best = m;
    ASSERT_LE(std::abs(fs.k[best] - target), fs.dk());
    EXPECT_LE(std::abs(fs.values[best] - exp_transform(fs.k[best])), 1e-4) << fs.k[best];
    EXPECT_LE(std::abs(fourier_at(sig, target) - exp_transform(target)), 1e-4) << target;
  }
}

TEST(TimeToFrequency, Parseval) {
  const TimeSignal sig = sample_causal([](double t) { return std::sin(3.0 * t) * std::exp(-0.5 * t); }, 30.0, 1e-2);
  const FrequencySamples fs = time_to_frequency(sig);
  double time_side = 0.0, freq_side = 0.0;
  for (double s : sig.samples) time_side += s * s * sig.dt;
  for (const cplx& v : fs.values) freq_side += std::norm(v) * fs.dk();
  EXPECT_NEAR(freq_side, time_side, 1e-6 * time_side);
}

TEST(TimeToFrequency, RoundTrip) {
  const TimeSignal sig = sample_causal([](double t) { return t * std::exp(-t) + (t < 2.0 ? 1.0 : 0.0); }, 20.0, 5e-3);
  const TimeSignal back = frequency_to_time(time_to_frequency(sig));
  ASSERT_EQ(back.size(), sig.size());
  for (std::size_t n = 0; n < sig.size(); ++n) EXPECT_NEAR(back.samples[n], sig.samples[n], 1e-8);
}

TEST(TimeToFrequency, Errors) {
  EXPECT_THROW(time_to_frequency(TimeSignal{}), std::invalid_argument);
  EXPECT_THROW(frequency_to_time(FrequencySamples{}), std::invalid_argument);
}

TEST(OmegaGrid, CompositeShape) {
  const OmegaGrid g = OmegaGrid::composite(256.0, 0.02, 1.0, 80);
  EXPECT_EQ(g.nodes.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.max(), 256.0);
  for (std::size_t i = 1; i < g.nodes.size(); ++i) EXPECT_GT(g.nodes[i], g.nodes[i - 1]);
  EXPECT_THROW(OmegaGrid::composite(0.0), std::invalid_argument);
}

TEST(Synthesis, ZeroDataGivesZeroField) {
  const Grid2D g = Grid2D::square(0.0, 1.0, 16);
  SynthesisOptions opt;
  opt.times = {0.1, 0.5};
  opt.spectrum = [](double) { return cplx(0.0, 0.0); };
  const SynthesisResult r = synthesize_time_solution(homogeneous_medium(g), g, SourceSpec<2>::none(),
                                                     RealField::Zero(g.node_count()), OmegaGrid::composite(64.0), opt);
  for (const auto& u : r.field.snapshots) EXPECT_EQ(u.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Synthesis, EigenfunctionDecay) {
  const Grid2D g = Grid2D::square(0.0, 1.0, 32);
  const RealField u0 = sine_mode(g);
  SynthesisOptions opt;
  opt.times = {0.05, 0.1, 0.2};
  opt.spectrum = [](double) { return cplx(0.0, 0.0); };
  SourceSpec<2> none = SourceSpec<2>::none();
  none.support_radius = 0.0;
  const SynthesisResult r =
      synthesize_time_solution(homogeneous_medium(g), g, none, u0, OmegaGrid::composite(256.0), opt);
  const double n0 = norm_L2(u0, g, everywhere<2>());
  for (std::size_t i = 0; i < opt.times.size(); ++i) {
    const double expected = std::exp(-2.0 * pi * pi * opt.times[i]);
    EXPECT_NEAR(norm_L2(r.field.snapshots[i], g, everywhere<2>()) / n0, expected, 0.02 * expected) << opt.times[i];
  }
}

TEST(Synthesis, MatchesHeatSolverHomogeneous) {
  const Grid2D g = Grid2D::square(0.0, 1.0, 64);
  const auto med = homogeneous_medium(g);
  auto src = SourceSpec<2>::gaussian(Point<2>(0.3, 0.6), 0.1, envelope::decaying_exponential(1.0));
  src.support_radius = 0.0;
  const RealField u0 = sine_mode(g);
  SynthesisOptions opt;
  opt.times = {0.5};
  opt.spectrum = spectrum::decaying_exponential(1.0);
  const SynthesisResult syn = synthesize_time_solution(med, g, src, u0, OmegaGrid::composite(256.0), opt);
  const RealField ref = solve_parabolic(med, g, TimeGrid::with_steps(0.5, 1000), src, u0, TimeScheme::crank_nicolson,
                                        1000)
                            .snapshots.back();
  EXPECT_LE(norm_L2(RealField(syn.field.snapshots[0] - ref), g, everywhere<2>()), 0.02 * norm_L2(ref, g, everywhere<2>()));
}

TEST(Synthesis, SampledEnvelopeMatchesClosedFormSpectrum) {
  const RadialCase c;
  SynthesisOptions exact = c.options();
  exact.times = {0.5, 1.0};
  SynthesisOptions sampled = exact;
  sampled.spectrum = nullptr;
  const auto a = synthesize_time_solution(c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(128.0), exact);
  const auto b = synthesize_time_solution(c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(128.0), sampled);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_LE((a.field.snapshots[i] - b.field.snapshots[i]).norm(), 1e-4 * a.field.snapshots[i].norm());
}

TEST(Synthesis, TruncationToleranceIsEnforced) {
  const RadialCase c;
  SynthesisOptions opt = c.options();
  opt.times = {0.5};
  opt.truncation_tolerance = 1e-30;
  EXPECT_THROW(synthesize_time_solution(c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(16.0), opt),
               TruncationError);
}

TEST(Synthesis, RejectsGeneralSourceAndBadGrid) {
  const RadialCase c;
  SourceSpec<3> general = c.src;
  general.general = [](double, const Point<3>&) { return 1.0; };
  SynthesisOptions opt = c.options();
  opt.times = {0.5};
  EXPECT_THROW(synthesize_time_solution(c.homog, c.grid, general, c.u0, OmegaGrid::composite(16.0), opt),
               std::invalid_argument);
  EXPECT_THROW(synthesize_time_solution(c.homog, c.grid, c.src, c.u0, OmegaGrid::dyadic(), opt), std::invalid_argument);
}

TEST(FrequencyIntegral, IdenticalMediaGiveZero) {
  const RadialCase c;
  const FrequencyIntegral fi =
      visibility_via_frequency_integral(c.homog, c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(64.0), 2.0,
                                        c.options());
  EXPECT_EQ(fi.bound_l2, 0.0);
  EXPECT_EQ(fi.bound_h1, 0.0);
}

TEST(FrequencyIntegral, BoundsTimeDomainVisibility) {
  const RadialCase c;
  const FrequencyIntegral fi =
      visibility_via_frequency_integral(c.cloak, c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(256.0), 2.0,
                                        c.options());
  const VisibilityTrace td = visibility_time_domain(c.cloak, c.homog, c.grid, TimeGrid::with_dt(6.0, 2e-3), c.src,
                                                    c.u0, 2.0, TimeScheme::crank_nicolson);
  EXPECT_GT(td.sup_l2, 0.0);
  EXPECT_GE(fi.bound_l2, td.sup_l2);
  EXPECT_GE(fi.bound_h1, td.sup_h1);
}

TEST(FrequencyIntegral, InsensitiveToHalvingOmegaMax) {
  const RadialCase c;
  const auto run = [&](double w) {
    return visibility_via_frequency_integral(c.cloak, c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(w), 2.0,
                                             c.options())
        .bound_h1;
  };
  const double full = run(256.0), half = run(128.0);
  EXPECT_LE(std::abs(full - half), 0.01 * full);
}

TEST(SynthesizedVisibility, AgreesWithTimeStepping) {
  const RadialCase c(0.4);
  SynthesisOptions opt = c.options();
  for (int i = 2; i <= 6; ++i) opt.times.push_back(0.5 * i);
  const VisibilityTrace fd =
      synthesized_visibility(c.cloak, c.homog, c.grid, c.src, c.u0, OmegaGrid::composite(256.0), 2.0, opt);
  const int steps = 3000;
  const VisibilityTrace td = visibility_time_domain(c.cloak, c.homog, c.grid, TimeGrid::with_steps(3.0, steps), c.src,
                                                    c.u0, 2.0, TimeScheme::crank_nicolson);
  for (std::size_t i = 0; i < fd.samples.size(); ++i) {
    const auto& a = td.samples[(i + 2) * steps / 6];
    EXPECT_NEAR(fd.samples[i].l2, a.l2, 0.10 * a.l2) << a.time;
    EXPECT_NEAR(fd.samples[i].h1, a.h1, 0.10 * a.h1) << a.time;
  }
}
