#include "heatcloak/blowup_map.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace heatcloak;

namespace {

template <int D>
SymTensor<D> fd_jacobian(const BlowupMap<D>& m, const Point<D>& x, double step = 1e-6) {
  SymTensor<D> j;
  for (int c = 0; c < D; ++c) {
    Point<D> e = Point<D>::Zero();
    e[c] = step;
    j.col(c) = (m.forward(x + e) - m.forward(x - e)) / (2.0 * step);
  }
  return j;
}

template <int D>
Point<D> random_point(std::mt19937& rng, double r_lo, double r_hi) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(r_lo, r_hi);
  Point<D> p;
  for (int i = 0; i < D; ++i) p[i] = n(rng);
  return u(rng) * p.normalized();
}

}  // namespace

TEST(ForwardMap, IdentityOutsideB2) {
  const BlowupMap<2> m(0.25);
  const Point<2> y = m.forward(Point<2>(3.0, 0.0));
  EXPECT_DOUBLE_EQ(y[0], 3.0);
  EXPECT_DOUBLE_EQ(y[1], 0.0);
}

TEST(ForwardMap, ContinuousAtEpsilon) {
  for (double eps : {0.05, 0.25, 0.45}) {
    const BlowupMap<3> m(eps);
    EXPECT_NEAR(m.forward(Point<3>(0.0, eps, 0.0)).norm(), 1.0, 1e-14);
  }
}

TEST(ForwardMap, MiddleBranchArithmetic) {
  const BlowupMap<2> m(0.5);
  const Point<2> y = m.forward(Point<2>(1.0, 0.0));
  EXPECT_NEAR(y[0], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(y[1], 0.0, 1e-15);
}

TEST(InverseMap, IdentityAndInnerBranch) {
  EXPECT_NEAR(BlowupMap<2>(0.25).inverse(Point<2>(3.0, 0.0))[0], 3.0, 1e-15);
  EXPECT_NEAR(BlowupMap<2>(0.5).inverse(Point<2>(1.0, 0.0))[0], 0.5, 1e-15);
}

TEST(InverseMap, RoundTrip200Points) {
  std::mt19937 rng(7);
  const BlowupMap<3> m(0.1);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Point<3> x = random_point<3>(rng, 0.0, 3.0);
    worst = std::max(worst, (m.inverse(m.forward(x)) - x).norm());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Jacobian, IdentityOutsideAndScaledInside) {
  const BlowupMap<2> m(0.2);
  EXPECT_NEAR((m.jacobian(Point<2>(2.5, 0.3)) - SymTensor<2>::Identity()).norm(), 0.0, 1e-15);
  EXPECT_NEAR((m.jacobian(Point<2>(0.05, 0.1)) - 5.0 * SymTensor<2>::Identity()).norm(), 0.0, 1e-12);
}

TEST(Jacobian, MiddleBranchMatchesFiniteDifferences) {
  std::mt19937 rng(11);
  const BlowupMap<3> m(0.15);
  for (int i = 0; i < 50; ++i) {
    const Point<3> x = random_point<3>(rng, 0.2, 1.95);
    EXPECT_LE((m.jacobian(x) - fd_jacobian(m, x)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(PushForward, IdentityLeavesTensorAndDensity) {
  const auto id = LinearMap<2>::scaling(1.0);
  SymTensor<2> a;
  a << 2.0, 0.3, 0.3, 1.5;
  const Point<2> y(0.4, -0.7);
  EXPECT_NEAR((push_forward_tensor([&](const Point<2>&) { return a; }, id, y) - a).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(push_forward_density([](const Point<2>&) { return 4.2; }, id, y), 4.2);
}

TEST(PushForward, ScalingGivesBlownUpCoefficients) {
  const double eps = 0.1;
  const auto unit = [](const Point<3>&) { return SymTensor<3>::Identity(); };
  const Point<3> y(0.3, 0.1, 0.2);
  // Pushing I forward through x -> x/eps gives eps I; through the inverse
  // x = eps y it gives the blown-up coefficient eps^{2-d} I = eps^{-1} I.
  EXPECT_NEAR((push_forward_tensor(unit, LinearMap<3>::scaling(1.0 / eps), y) - eps * SymTensor<3>::Identity()).norm(),
              0.0, 1e-14);
  EXPECT_NEAR((push_forward_tensor(unit, LinearMap<3>::scaling(eps), y) - SymTensor<3>::Identity() / eps).norm(), 0.0,
              1e-12);

  const auto f2 = LinearMap<2>::scaling(1.0 / eps);
  EXPECT_NEAR(push_forward_density([](const Point<2>&) { return 1.0; }, f2, Point<2>(0.5, 0.2)), eps * eps, 1e-15);
  EXPECT_NEAR(push_forward_density([](const Point<2>&) { return 1.0; }, LinearMap<2>::scaling(eps), Point<2>(0.5, 0.2)),
              1.0 / (eps * eps), 1e-10);
}

TEST(PushForward, CloakLayerMatchesFiniteDifferenceOracle) {
  const BlowupMap<2> m(0.2);
  const Point<2> y(1.5 / std::sqrt(2.0), 1.5 / std::sqrt(2.0));
  const Point<2> x = m.inverse(y);
  const SymTensor<2> j = fd_jacobian(m, x);
  const SymTensor<2> oracle = j * j.transpose() / std::abs(j.determinant());
  const SymTensor<2> a = push_forward_tensor([](const Point<2>&) { return SymTensor<2>::Identity(); }, m, y);
  EXPECT_LE((a - oracle).cwiseAbs().maxCoeff(), 1e-6);

  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Point<2> yy = random_point<2>(rng, 1.05, 1.95);
    const double oracle_rho = 1.0 / std::abs(fd_jacobian(m, m.inverse(yy)).determinant());
    EXPECT_NEAR(push_forward_density([](const Point<2>&) { return 1.0; }, m, yy), oracle_rho, 1e-6);
  }
}

TEST(PushForward, ComposedMapChainRule) {
  const BlowupMap<2> inner(0.3);
  const auto outer = LinearMap<2>::scaling(2.0);
  const ComposedMap<LinearMap<2>, BlowupMap<2>> c(outer, inner);
  const Point<2> x(0.7, 0.4);
  EXPECT_LE((c.jacobian(x) - 2.0 * inner.jacobian(x)).norm(), 1e-14);
  EXPECT_LE((c.inverse(c.forward(x)) - x).norm(), 1e-14);
}

TEST(BlowupMap, RejectsEpsilonOutsideRange) {
  EXPECT_THROW(BlowupMap<2>(0.0), std::invalid_argument);
  EXPECT_THROW(BlowupMap<2>(0.51), std::invalid_argument);
  EXPECT_NO_THROW(BlowupMap<2>(0.5));
}
