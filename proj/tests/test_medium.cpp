#include "heatcloak/medium.hpp"

#include <gtest/gtest.h>

using namespace heatcloak;

namespace {

template <class Grid>
std::size_t cell_at(const Grid& g, const Point<Grid::dimension>& p) {
  std::size_t best = 0;
  double d = 1e300;
  for (std::size_t c = 0; c < g.cell_count(); ++c)
    if (const double e = (g.cell_center(c) - p).norm(); e < d) {
      d = e;
      best = c;
    }
  return best;
}

}  // namespace

TEST(CloakMedium, ExteriorIsUnit) {
  const Grid2D g = Grid2D::square(-4.0, 4.0, 16);  // cell centers at odd multiples of 0.25
  const auto m = assemble_cloak_medium(BlowupMap<2>(0.1), ObjectSpec<2>::standard(), g);
  const std::size_t c = cell_at(g, Point<2>(2.75, 1.25));
  ASSERT_NEAR(g.cell_center(c).norm(), 3.02, 0.01);
  EXPECT_EQ(m.region[c], CellRegion::exterior);
  EXPECT_EQ(m.tensor[c], SymTensor<2>::Identity());
  EXPECT_EQ(m.density[c], 1.0);
}

TEST(CloakMedium, NearIdentityAtOuterEdgeForLargeEpsilon) {
  const RadialGrid<3> g(std::vector<double>{0.0, 1.98, 2.0, 4.0});
  const auto m = assemble_cloak_medium(BlowupMap<3>(0.499), ObjectSpec<3>::standard(), g);
  const auto [lo, hi] = eigen_range<3>(m.tensor[1]);
  EXPECT_NEAR(g.cell_center(1).norm(), 1.99, 1e-12);
  EXPECT_LE(std::max(std::abs(lo - 1.0), std::abs(hi - 1.0)), 0.1);
}

TEST(CloakMedium, OuterEdgeEigenvaluesForLargeEpsilon) {
  const RadialGrid<3> g(std::vector<double>{0.0, 1.98, 2.0, 4.0});
  const double eps = 0.499, s = 1.99;
  const auto m = assemble_cloak_medium(BlowupMap<3>(eps), ObjectSpec<3>::standard(), g);
  // d = 3: radial f' r² / s², tangential 1 / f'.
  const double fp = 1.0 / (2.0 - eps), r = (2.0 - eps) * s - (2.0 - 2.0 * eps);
  EXPECT_NEAR(m.tensor[1](0, 0), fp * r * r / (s * s), 1e-12);
  EXPECT_NEAR(m.tensor[1](1, 1), 1.0 / fp, 1e-12);
  EXPECT_NEAR(m.tensor[1](2, 2), 1.0 / fp, 1e-12);
}

TEST(CloakMedium, LayerEigenvaluesMatchRadialFormula) {
  // Cell center exactly at (1.25, 0).
  const Grid2D g(-4.0, -4.25, 0.5, 16, 17);
  const double eps = 0.1;
  const auto m = assemble_cloak_medium(BlowupMap<2>(eps), ObjectSpec<2>::standard(), g);
  const std::size_t c = cell_at(g, Point<2>(1.25, 0.0));
  ASSERT_NEAR((g.cell_center(c) - Point<2>(1.25, 0.0)).norm(), 0.0, 1e-14);
  EXPECT_EQ(m.region[c], CellRegion::cloak_layer);
  // Middle branch s = f(r) = (2 - 2ε + r)/(2 - ε): radial eigenvalue f' r / f,
  // tangential f / (f' r), density 1 / (f' f / r).
  const double s = 1.25, r = (2.0 - eps) * s - (2.0 - 2.0 * eps), fp = 1.0 / (2.0 - eps);
  EXPECT_NEAR(m.tensor[c](0, 0), fp * r / s, 1e-8);
  EXPECT_NEAR(m.tensor[c](1, 1), s / (fp * r), 1e-8);
  EXPECT_NEAR(m.tensor[c](0, 1), 0.0, 1e-12);
  EXPECT_NEAR(m.density[c], r / (fp * s), 1e-8);
}

TEST(BlownupMedium, InclusionScaling) {
  const double eps = 0.2;
  const RadialGrid<3> g3(std::vector<double>{0.0, 0.1, 0.5, 3.0});
  const auto m3 = assemble_blownup_medium(BlowupMap<3>(eps), ObjectSpec<3>::constant(1.0, 3.0, 2.0), g3);
  EXPECT_EQ(m3.region[0], CellRegion::inclusion);
  EXPECT_NEAR((m3.tensor[0] - SymTensor<3>::Identity() / eps).norm(), 0.0, 1e-12);
  EXPECT_NEAR(m3.density[0], 3.0 / (eps * eps * eps), 1e-9);

  const RadialGrid<2> g2(std::vector<double>{0.0, 0.1, 0.5, 3.0});
  const auto m2 = assemble_blownup_medium(BlowupMap<2>(eps), ObjectSpec<2>::constant(2.0, 1.0, 2.0), g2);
  EXPECT_NEAR(m2.density[0], 1.0 / (eps * eps), 1e-10);
  EXPECT_NEAR((m2.tensor[0] - 2.0 * SymTensor<2>::Identity()).norm(), 0.0, 1e-14);
  for (std::size_t c = 1; c < g2.cell_count(); ++c) {
    EXPECT_EQ(m2.region[c], CellRegion::exterior);
    EXPECT_EQ(m2.density[c], 1.0);
  }
}

TEST(Ellipticity, HomogeneousField) {
  const Grid2D g = Grid2D::square(-3.0, 3.0, 6);
  const auto rep = check_ellipticity(homogeneous_medium(g), 0.5, 2.0);
  EXPECT_TRUE(rep.ok());
  const auto& b = rep.regions.at(CellRegion::exterior);
  EXPECT_EQ(b.min_eigenvalue, 1.0);
  EXPECT_EQ(b.max_eigenvalue, 1.0);
}

TEST(Ellipticity, CloakLayerPositive) {
  const Grid2D g = Grid2D::square(-2.5, 2.5, 100);
  const auto rep = check_ellipticity(assemble_cloak_medium(BlowupMap<2>(0.1), ObjectSpec<2>::standard(), g), 0.0,
                                     1e300);
  EXPECT_GT(rep.regions.at(CellRegion::cloak_layer).min_eigenvalue, 0.0);
  EXPECT_GT(rep.regions.at(CellRegion::cloak_layer).min_density, 0.0);
  EXPECT_TRUE(rep.ok());
}

TEST(Ellipticity, ObjectAboveBoundIsRejected) {
  const Grid2D g = Grid2D::square(-3.0, 3.0, 12);
  EXPECT_THROW(assemble_cloak_medium(BlowupMap<2>(0.1), ObjectSpec<2>::constant(5.0, 1.0, 2.0), g), MediumError);
  const auto m = assemble_cloak_medium(BlowupMap<2>(0.1), ObjectSpec<2>::constant(5.0, 1.0, 5.0), g);
  const auto rep = check_ellipticity(m, 0.5, 2.0);
  EXPECT_FALSE(rep.ok());
  EXPECT_GT(rep.tensor_violations, 0u);
}

TEST(Medium, GridMustCoverB2) {
  EXPECT_THROW(assemble_cloak_medium(BlowupMap<2>(0.1), ObjectSpec<2>::standard(), Grid2D::square(-1.5, 1.5, 6)),
               MediumError);
}
