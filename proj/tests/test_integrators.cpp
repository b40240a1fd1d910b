#include "oracle.hpp"

#include "stbem/integrators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace stbem;

namespace {

CombinedKernel GG(std::vector<KernelTerm> t) { return CombinedKernel(KernelKind::GG, std::move(t)); }
CombinedKernel g(double tau) { return CombinedKernel(KernelKind::g, {{tau, 1.0}}); }

const Segment kBase{{0.0, 0.0}, {1.0, 0.0}, 0.25};
const CurvilinearTriangle kTriangle{{0.0, 0.0}, {0.25, 0.0}, {0.25, 0.25}};

double u0(Point2 p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); }

void expect_rel(double got, double want, double tol = 1e-12) { EXPECT_NEAR(got, want, tol * std::abs(want)); }

} // namespace

// Reference values below come from mpmath adaptive quadrature at 30 digits.

TEST(SegmentPair, EqualSegments) {
  const QuadOrders q;
  expect_rel(segment_pair_integral(kBase, kBase, GG({{0.0625, 1.0}}), q), -0.00092501388022725187);
  expect_rel(segment_pair_integral(kBase, kBase, GG({{1e-4, 1.0}}), q), -9.2440047827040434e-8);
}

TEST(SegmentPair, PerpendicularTouching) {
  const Segment up{{0.0, 0.0}, {0.0, 1.0}, 0.125};
  expect_rel(segment_pair_integral(kBase, up, GG({{0.03, 1.0}}), {}), -7.214791528214079e-5);
}

TEST(SegmentPair, CollinearDisjoint) {
  const Segment far{{0.375, 0.0}, {1.0, 0.0}, 0.125};
  expect_rel(segment_pair_integral(kBase, far, GG({{0.01, 1.0}}), {}), -5.4966430594868441e-7);
}

TEST(SegmentPair, CombinedTermsCancelConsistently) {
  expect_rel(segment_pair_integral(kBase, kBase, GG({{0.25, 1.0}, {0.125, -2.0}, {0.0625, 1.0}}), {}),
             -0.0017351368263762951);
}

TEST(SegmentPair, IsSymmetric) {
  const Segment up{{0.0, 0.0}, {0.0, 1.0}, 0.125};
  const auto k = GG({{0.03, 1.0}});
  EXPECT_NEAR(segment_pair_integral(kBase, up, k, {}), segment_pair_integral(up, kBase, k, {}), 1e-18);
}

TEST(PointSegment, PointOnSegment) {
  expect_rel(point_segment_integral({0.1, 0.0}, kBase, g(0.02), {}), -0.061394152695265677);
}

TEST(PointTriangle, VertexAndOutsidePoints) {
  expect_rel(point_triangle_integral({0.0, 0.0}, kTriangle, g(0.05), u0, {}), -0.00034685729410179526);
  expect_rel(point_triangle_integral({0.5, 0.0}, kTriangle, g(0.05), u0, {}), -0.00017541996990218828);
}

TEST(PointTriangle, PointOnEdge) {
  expect_rel(point_triangle_integral({0.125, 0.0}, kTriangle, g(0.01), u0, {}), -0.00021757435135727734);
}

TEST(PointTriangle, AreaWithUnitDensity) {
  // The heat kernel at large τ is almost constant; compare with a smooth oracle.
  const CombinedKernel heat(KernelKind::heat, {{1e3, 1.0}});
  const double v = point_triangle_integral({0.0, 0.0}, kTriangle, heat, [](Point2) { return 1.0; }, {});
  // ∫_T G(τ, |y|) dy in polar coordinates around the vertex: angle 0..π/4, ray to x = 0.25,
  // ∫_0^R e^{-r²/4τ} r dr / (4πτ) = (1 - e^{-R²/4τ}) / (2π).
  const double ref = oracle::gauss(
      [](double th) {
        const double rmax = 0.25 / std::cos(th);
        return -std::expm1(-rmax * rmax / 4e3) / (2.0 * std::numbers::pi);
      },
      0.0, std::numbers::pi / 4.0);
  EXPECT_NEAR(v, ref, 1e-9 * ref);
}

TEST(CombinedKernel, DropsCausalTermsAndMergesEqualTimes) {
  const CombinedKernel k(KernelKind::GG, {{0.5, 1.0}, {0.0, 3.0}, {-1.0, 2.0}, {0.5, -0.25}, {0.1, 1.0}});
  ASSERT_EQ(k.terms().size(), 2u);
  EXPECT_DOUBLE_EQ(k.terms()[0].tau, 0.1);
  EXPECT_DOUBLE_EQ(k.terms()[1].tau, 0.5);
  EXPECT_DOUBLE_EQ(k.terms()[1].coeff, 0.75);
  EXPECT_DOUBLE_EQ(k.cutoff_r2(), cutoff_r2(0.5));
  EXPECT_NEAR(k(0.04), frak_G(0.1, 0.04) + 0.75 * frak_G(0.5, 0.04), 1e-17);
}

TEST(CombinedKernel, EmptyKernelIntegratesToZero) {
  const CombinedKernel k(KernelKind::GG, {{-0.1, 1.0}});
  EXPECT_TRUE(k.empty());
  EXPECT_EQ(segment_pair_integral(kBase, kBase, k, {}), 0.0);
}

TEST(GradedPanels, ResolveBoundaryLayersAtTheGivenScale) {
  const double scale = 0.01;
  for (auto [left, right] : {std::pair{true, false}, std::pair{true, true}}) {
    std::vector<double> z;
    std::vector<double> w;
    graded_panels(2.0, scale, 8, left, right, z, w);
    double len = 0.0;
    double layer = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      len += w[i];
      layer += w[i] * (std::exp(-z[i] / scale) + (right ? std::exp((z[i] - 2.0) / scale) : 0.0));
    }
    EXPECT_NEAR(len, 2.0, 1e-14);
    EXPECT_NEAR(layer, (right ? 2.0 : 1.0) * scale * -std::expm1(-2.0 / scale), 1e-10 * scale);
  }
}
