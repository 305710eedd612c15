#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "shellcompat/cmc_profile.hpp"
#include "shellcompat/surface.hpp"
#include "test_support.hpp"

using namespace shellcompat;
using std::numbers::pi;

namespace {

// Closed-form values for the spot checks.
const double kTanh1 = std::tanh(1.0);
const double kSech1 = 1.0 / std::cosh(1.0);

int node_near(double x0, double h, double x) { return static_cast<int>(std::lround((x - x0) / h)); }

}  // namespace

TEST(Catalog, PlaneCoefficients) {
  const SurfaceGeometry g = make_catalog_surface("plane", 9);
  EXPECT_EQ((g.A1 - 1.0).max_abs(), 0.0);
  EXPECT_EQ((g.A2 - 1.0).max_abs(), 0.0);
  EXPECT_EQ(g.p.max_abs() + g.q.max_abs() + g.Hc.max_abs() + g.Kc.max_abs(), 0.0);
}

TEST(Catalog, SphereCoefficients) {
  const SurfaceGeometry g = make_catalog_surface("sphere", 33);
  const Grid2D& gr = g.grid();
  for (int i = 0; i < gr.n_alpha; i += 5) {
    const double t = gr.alpha(i);
    EXPECT_DOUBLE_EQ(g.A1(i, 3), 1.0);
    EXPECT_NEAR(g.A2(i, 3), std::sin(t), 1e-15);
    EXPECT_NEAR(g.q(i, 3), std::cos(t), 1e-15);
    EXPECT_DOUBLE_EQ(g.Hc(i, 3), 1.0);
    EXPECT_NEAR(g.Kc(i, 3), std::sin(t), 1e-15);
  }
}

TEST(Catalog, KinkSpotValues) {
  const SurfaceSpec spec = default_surface_spec("pseudosphere_kink");
  const SurfaceGeometry g = make_catalog_surface(spec, 27, 9);  // h = 0.1, x = -1 is node 20
  const int i = node_near(spec.alpha_min, g.grid().h_alpha, -1.0);
  ASSERT_NEAR(g.grid().alpha(i), -1.0, 1e-12);
  EXPECT_NEAR(g.A1(i, 0), kTanh1, 1e-12);
  EXPECT_NEAR(g.A2(i, 0), kSech1, 1e-12);
  EXPECT_NEAR(kTanh1, 0.761594, 1e-6);
  EXPECT_NEAR(kSech1, 0.648054, 1e-6);
}

TEST(Catalog, RejectsChartViolations) {
  SurfaceSpec kink = default_surface_spec("pseudosphere_kink");
  kink.alpha_max = 0.5;  // u crosses pi/2
  EXPECT_THROW(make_catalog_surface(kink, 17, 17), std::invalid_argument);
  SurfaceSpec sphere = default_surface_spec("sphere");
  sphere.alpha_min = 0.0;
  EXPECT_THROW(make_catalog_surface(sphere, 17, 17), std::invalid_argument);
  EXPECT_THROW(make_catalog_surface("torus", 17), std::invalid_argument);
}

TEST(DerivePq, PlaneIsExactlyZero) {
  const SurfaceGeometry g = make_catalog_surface("plane", 9);
  auto [p, q] = derive_pq(g.A1, g.A2);
  EXPECT_EQ(p.max_abs(), 0.0);
  EXPECT_EQ(q.max_abs(), 0.0);
}

TEST(DerivePq, SphereAndCatenoidConverge) {
  auto sphere_err = [](int n) {
    const SurfaceGeometry g = make_catalog_surface("sphere", n);
    auto [p, q] = derive_pq(g.A1, g.A2);
    EXPECT_LT(p.max_abs(), 1e-14);
    return testsupport::interior_error(q, [](double t, double) { return std::cos(t); }, 1);
  };
  const auto es = testsupport::sweep({33, 65, 129}, sphere_err);
  for (double o : testsupport::orders(es)) EXPECT_NEAR(o, 2.0, 0.1);

  auto cat_err = [](int n) {
    const SurfaceGeometry g = make_catalog_surface("catenoid", n);
    auto [p, q] = derive_pq(g.A1, g.A2);
    return testsupport::interior_error(q, [](double a, double) { return std::tanh(a); }, 1);
  };
  const auto ec = testsupport::sweep({33, 65}, cat_err);
  EXPECT_NEAR(testsupport::orders(ec)[0], 2.0, 0.15);
}

TEST(DerivePq, RejectsNonPositiveMetric) {
  const Grid2D g = Grid2D::spanning(5, 5, 0, 1, 0, 1);
  EXPECT_THROW(derive_pq(ScalarField(g, 0.0), ScalarField(g, 1.0)), std::invalid_argument);
}

TEST(Gmc, PlaneExactlyZero) {
  const GmcResiduals r = gmc_residuals(make_catalog_surface("plane", 65));
  EXPECT_LE(r.gauss.max_abs(), 1e-13);
  EXPECT_LE(r.codazzi1.max_abs(), 1e-13);
  EXPECT_LE(r.codazzi2.max_abs(), 1e-13);
}

TEST(Gmc, CatalogSurfacesConvergeAtSecondOrder) {
  for (const char* name : {"sphere", "catenoid", "pseudosphere_kink", "cmc_profile"}) {
    const auto gauss = testsupport::sweep({33, 65, 129}, [&](int n) {
      return testsupport::interior_max(gmc_residuals(make_catalog_surface(name, n)).gauss, 0);
    });
    const auto cod2 = testsupport::sweep({33, 65, 129}, [&](int n) {
      return testsupport::interior_max(gmc_residuals(make_catalog_surface(name, n)).codazzi2, 0);
    });
    for (double o : testsupport::orders(gauss)) EXPECT_NEAR(o, 2.0, 0.3) << name;
    for (double o : testsupport::orders(cod2)) EXPECT_NEAR(o, 2.0, 0.3) << name;
  }
}

TEST(Gmc, ScaledSphereStallsAtTenthOfSinTheta) {
  SurfaceSpec s = default_surface_spec("sphere");
  s.hc_scale = 1.1;
  const SurfaceGeometry g = make_catalog_surface(s, 65, 65);
  const ScalarField gauss = gmc_residuals(g).gauss;
  // residual -> 0.1 sin(theta); theta = pi/2 sits at the middle row
  EXPECT_NEAR(gauss(32, 10), 0.1, 1e-3);
  EXPECT_LT(testsupport::interior_error(gauss, [](double t, double) { return 0.1 * std::sin(t); }, 0), 1e-3);
}

TEST(Curvatures, PlaneSphereCatenoid) {
  const CurvatureSet cp = curvatures(make_catalog_surface("plane", 9));
  EXPECT_EQ(cp.kappa1.max_abs() + cp.kappa2.max_abs() + cp.gaussK.max_abs(), 0.0);
  EXPECT_TRUE(std::isinf(cp.R1(3, 3)));

  const CurvatureSet cs = curvatures(make_catalog_surface("sphere", 17));
  EXPECT_LT((cs.kappa1 + 1.0).max_abs(), 1e-14);
  EXPECT_LT((cs.kappa2 + 1.0).max_abs(), 1e-14);
  EXPECT_LT((cs.meanH + 1.0).max_abs(), 1e-14);
  EXPECT_LT((cs.gaussK - 1.0).max_abs(), 1e-14);
  EXPECT_LT((cs.R1 - 1.0).max_abs(), 1e-14);

  const SurfaceGeometry cat = make_catalog_surface("catenoid", 17);
  const CurvatureSet cc = curvatures(cat);
  const Grid2D& gr = cat.grid();
  for (int i = 0; i < gr.n_alpha; i += 4) {
    const double s2 = 1.0 / std::pow(std::cosh(gr.alpha(i)), 2);
    EXPECT_NEAR(cc.kappa1(i, 2), -s2, 1e-14);
    EXPECT_NEAR(cc.kappa2(i, 2), s2, 1e-14);
    EXPECT_NEAR(cc.meanH(i, 2), 0.0, 1e-15);
    EXPECT_NEAR(cc.gaussK(i, 2), -s2 * s2, 1e-14);
  }
}

TEST(CmcProfile, RejectsBadParameters) {
  EXPECT_THROW(integrate_cmc_profile(0.0, 1.0, 0.01, 10), std::invalid_argument);
  EXPECT_THROW(integrate_cmc_profile(0.5, 0.5, 0.01, 10), std::invalid_argument);  // C = 2H^2
  EXPECT_THROW(integrate_cmc_profile(0.5, 0.4, 0.01, 10), std::invalid_argument);
}

TEST(CmcProfile, FirstIntegralConserved) {
  const double H = 0.5, C = 2 * H * H * std::cosh(0.2) + 1e-3;
  const CmcProfile p = integrate_cmc_profile(H, C, 1e-3, 2001);
  EXPECT_EQ(p.steps_taken, 2000);
  EXPECT_LE(p.max_invariant_drift, 1e-8);
  for (std::size_t k = 0; k < p.u.size(); k += 250) {
    EXPECT_NEAR(p.du[k] * p.du[k] + 2 * H * H * std::cosh(2 * p.u[k]), C, 1e-8);
  }
}

TEST(CmcProfile, MatchesSmallAmplitudeLinearization) {
  // near u = 0 the ODE is u'' = -4 H^2 u: u ~ (u'(0) / 2H) sin(2H alpha)
  const double H = 0.5, C = 2 * H * H + 1e-8;
  const CmcProfile p = integrate_cmc_profile(H, C, 0.01, 101);
  const double amp = std::sqrt(C - 2 * H * H) / (2 * H);
  EXPECT_NEAR(p.u[100], amp * std::sin(2 * H * 1.0), 1e-10);
}

TEST(GeometryBundle, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "shellcompat_bundle_test";
  std::filesystem::remove_all(dir);
  const SurfaceGeometry g = make_catalog_surface("catenoid", 13);
  write_geometry_bundle(dir, g);
  const SurfaceGeometry back = load_geometry_bundle(dir);
  EXPECT_EQ(back.grid().n_alpha, 13);
  EXPECT_EQ((back.Kc - g.Kc).max_abs(), 0.0);
  EXPECT_EQ((back.q - g.q).max_abs(), 0.0);
  EXPECT_FALSE(back.analytic.has_value());
  std::filesystem::remove(dir / "Hc.csv");
  EXPECT_THROW(load_geometry_bundle(dir), std::invalid_argument);
  std::filesystem::remove_all(dir);
}
