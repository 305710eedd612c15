#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "shellcompat/frames.hpp"
#include "test_support.hpp"

using namespace shellcompat;

namespace {

// Unit-sphere chart written out independently of the catalog closures.
Mat3 sphere_frame(double t, double f) {
  Mat3 m;
  m.col(0) = Vec3(std::cos(t) * std::cos(f), std::cos(t) * std::sin(f), -std::sin(t));
  m.col(1) = Vec3(-std::sin(f), std::cos(f), 0.0);
  m.col(2) = Vec3(std::sin(t) * std::cos(f), std::sin(t) * std::sin(f), std::cos(t));
  return m;
}

double sphere_frame_error(int n) {
  const SurfaceGeometry g = make_catalog_surface("sphere", n);
  const Grid2D& gr = g.grid();
  const FrameIntegration fi = integrate_frames(g, sphere_frame(gr.alpha(0), gr.beta(0)));
  double e = 0.0;
  for (int i = 0; i < gr.n_alpha; ++i)
    for (int j = 0; j < gr.n_beta; ++j)
      e = std::max(e, (fi.frames(i, j) - sphere_frame(gr.alpha(i), gr.beta(j))).norm());
  return e;
}

}  // namespace

TEST(GwMatrices, SkewAndSpotValues) {
  const SurfaceGeometry plane = make_catalog_surface("plane", 9);
  auto [L0, M0] = gw_matrices(plane, 4, 4);
  EXPECT_EQ(L0.norm() + M0.norm(), 0.0);

  const SurfaceGeometry sphere = make_catalog_surface("sphere", 65);  // row 32 is theta = pi/2
  auto [L, M] = gw_matrices(sphere, 32, 7);
  Mat3 Le, Me;
  Le << 0, 0, 1, 0, 0, 0, -1, 0, 0;
  Me << 0, 0, 0, 0, 0, 1, 0, -1, 0;
  EXPECT_LT((L - Le).norm(), 1e-14);
  EXPECT_LT((M - Me).norm(), 1e-14);
  EXPECT_LT((L + L.transpose()).norm(), 1e-15);
  EXPECT_LT((M + M.transpose()).norm(), 1e-15);

  const SurfaceGeometry cat = make_catalog_surface("catenoid", 33);  // row 16 is alpha = 0
  auto [Lc, Mc] = gw_matrices(cat, 16, 3);
  EXPECT_NEAR(Lc(0, 2), 1.0, 1e-15);
  EXPECT_NEAR(Mc(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(Mc(1, 2), -1.0, 1e-15);
}

TEST(GramSchmidt, RestoresRotation) {
  Mat3 m = sphere_frame(0.7, 0.3);
  m(0, 1) += 1e-4;
  m(2, 2) -= 2e-4;
  const Mat3 r = gram_schmidt(m);
  EXPECT_LT(frame_defect(r), 1e-14);
  EXPECT_LT((r - sphere_frame(0.7, 0.3)).norm(), 1e-3);
}

TEST(IntegrateFrames, PlaneStaysIdentity) {
  const SurfaceGeometry g = make_catalog_surface("plane", 17);
  const FrameIntegration fi = integrate_frames(g, Mat3::Identity());
  for (const auto& f : fi.frames.frames) EXPECT_LT((f - Mat3::Identity()).norm(), 1e-15);
  EXPECT_EQ(fi.closure_res.max_abs(), 0.0);
}

TEST(IntegrateFrames, RejectsNonRotationStart) {
  const SurfaceGeometry g = make_catalog_surface("plane", 9);
  Mat3 bad = Mat3::Identity();
  bad(2, 2) = -1.0;  // reflection
  EXPECT_THROW(integrate_frames(g, bad), std::invalid_argument);
  EXPECT_THROW(integrate_frames(g, 1.01 * Mat3::Identity()), std::invalid_argument);
}

TEST(IntegrateFrames, SphereMatchesChartAndStaysOrthonormal) {
  const auto e = testsupport::sweep({17, 33, 65}, sphere_frame_error);
  for (double o : testsupport::orders(e)) EXPECT_GE(o, 3.5);
  const SurfaceGeometry g = make_catalog_surface("sphere", 33);
  const FrameIntegration fi = integrate_frames(g, sphere_frame(g.grid().alpha(0), 0.0));
  for (const auto& f : fi.frames.frames) EXPECT_LT(frame_defect(f), 1e-10);
}

TEST(IntegrateFrames, ClosureConvergesOnlyWhenGmcHolds) {
  auto closure = [](double scale, int n) {
    SurfaceSpec s = default_surface_spec("sphere");
    s.hc_scale = scale;
    const SurfaceGeometry g = make_catalog_surface(s, n, n);
    return integrate_frames(g, sphere_frame(g.grid().alpha(0), 0.0)).closure_res.max_abs();
  };
  const auto good = testsupport::sweep({33, 65, 129}, [&](int n) { return closure(1.0, n); });
  for (double o : testsupport::orders(good)) EXPECT_GE(o, 2.0);
  EXPECT_LT(good.back(), 1e-6);
  const auto bad = testsupport::sweep({33, 65, 129}, [&](int n) { return closure(1.1, n); });
  EXPECT_GT(bad.back(), 0.05);
  for (double o : testsupport::orders(bad)) EXPECT_LT(std::abs(o), 0.5);
}

TEST(IntegrateFrames, CoarseStepTripsDriftGuard) {
  SurfaceSpec s = default_surface_spec("sphere");
  s.radius = 1.0;
  s.alpha_min = 0.1;
  s.alpha_max = 3.0;
  s.beta_max = 6.0;
  const SurfaceGeometry g = make_catalog_surface(s, 4, 4);
  EXPECT_THROW(integrate_frames(g, sphere_frame(0.1, 0.0)), NumericalError);
}

TEST(ReconstructPositions, PlaneIsExact) {
  const SurfaceGeometry g = make_catalog_surface("plane", 9);
  const FrameIntegration fi = integrate_frames(g, Mat3::Identity());
  const VectorField3 r = reconstruct_positions(g, fi.frames, Vec3(1, 2, 3));
  const Grid2D& gr = g.grid();
  for (int i = 0; i < gr.n_alpha; ++i)
    for (int j = 0; j < gr.n_beta; ++j)
      EXPECT_LT((r(i, j) - Vec3(1 + gr.alpha(i), 2 + gr.beta(j), 3)).norm(), 1e-14);
}

TEST(ReconstructPositions, SphereErrorDropsFasterThanSecondOrder) {
  auto err = [](int n) {
    const SurfaceGeometry g = make_catalog_surface("sphere", n);
    const Grid2D& gr = g.grid();
    const Mat3 f0 = sphere_frame(gr.alpha(0), gr.beta(0));
    const FrameIntegration fi = integrate_frames(g, f0);
    const VectorField3 r = reconstruct_positions(g, fi.frames, f0.col(2));  // unit sphere: r = N
    double e = 0.0;
    for (int i = 0; i < gr.n_alpha; ++i)
      for (int j = 0; j < gr.n_beta; ++j) e = std::max(e, (r(i, j) - sphere_frame(gr.alpha(i), gr.beta(j)).col(2)).norm());
    return e;
  };
  const auto e = testsupport::sweep({33, 65, 129}, err);
  for (std::size_t k = 1; k < e.size(); ++k) EXPECT_GE(e[k - 1] / e[k], 3.5);
}

TEST(ReconstructPositions, CatenoidSatisfiesImplicitEquation) {
  auto err = [](int n) {
    const SurfaceGeometry g = make_catalog_surface("catenoid", n);
    const Grid2D& gr = g.grid();
    const double a = gr.alpha(0);
    Mat3 f0;  // catenoid frame at beta = 0
    f0.col(0) = Vec3(std::tanh(a), 0, 1 / std::cosh(a));
    f0.col(1) = Vec3(0, 1, 0);
    f0.col(2) = Vec3(-1 / std::cosh(a), 0, std::tanh(a));
    const FrameIntegration fi = integrate_frames(g, f0);
    const VectorField3 r = reconstruct_positions(g, fi.frames, Vec3(std::cosh(a), 0, a));
    double e = 0.0;
    for (const Vec3& p : r.vectors) e = std::max(e, std::abs(p.x() * p.x() + p.y() * p.y() - std::pow(std::cosh(p.z()), 2)));
    return e;
  };
  const auto e = testsupport::sweep({17, 33, 65}, err);
  EXPECT_LT(e.back(), 1e-6);
  for (double o : testsupport::orders(e)) EXPECT_GE(o, 1.8);
}

TEST(Weingarten, PlaneZeroAndCurvedAtLeastSecondOrder) {
  const SurfaceGeometry plane = make_catalog_surface("plane", 9);
  const FrameIntegration fp = integrate_frames(plane, Mat3::Identity());
  auto [p1, p2] = weingarten_residual(plane, fp.frames, reconstruct_positions(plane, fp.frames, Vec3::Zero()));
  EXPECT_EQ(p1.max_abs() + p2.max_abs(), 0.0);

  for (const char* name : {"sphere", "pseudosphere_kink"}) {
    const auto e = testsupport::sweep({33, 65, 129}, [&](int n) {
      const SurfaceGeometry g = make_catalog_surface(name, n);
      const FrameIntegration fi = integrate_frames(g, Mat3::Identity());
      const VectorField3 r = reconstruct_positions(g, fi.frames, Vec3::Zero());
      auto [w1, w2] = weingarten_residual(g, fi.frames, r);
      return std::max(testsupport::interior_max(w1, 1), testsupport::interior_max(w2, 1));
    });
    for (double o : testsupport::orders(e)) EXPECT_GE(o, 1.7) << name;
  }
}

TEST(CatalogCharts, FramesSatisfyGaussWeingarten) {
  // Phi_alpha = Phi L and Phi_beta = Phi M checked by centred differences of
  // the closures themselves
  for (const char* name : {"sphere", "catenoid"}) {
    const SurfaceGeometry g = make_catalog_surface(name, 9);
    const auto& frame = g.analytic->frame;
    const double a = g.grid().alpha(4), b = g.grid().beta(4), d = 1e-5;
    const Mat3 fa = (frame(a + d, b) - frame(a - d, b)) / (2 * d);
    const Mat3 fb = (frame(a, b + d) - frame(a, b - d)) / (2 * d);
    auto [L, M] = gw_matrices(g, 4, 4);
    EXPECT_LT((fa - frame(a, b) * L).norm(), 1e-8) << name;
    EXPECT_LT((fb - frame(a, b) * M).norm(), 1e-8) << name;
    const Vec3 ra = (g.analytic->position(a + d, b) - g.analytic->position(a - d, b)) / (2 * d);
    EXPECT_LT((ra - g.A1(4, 4) * frame(a, b).col(0)).norm(), 1e-8) << name;
  }
}

TEST(FrameCsv, HeaderAndRowCount) {
  const SurfaceGeometry g = make_catalog_surface("plane", 9);
  std::stringstream ss;
  write_frames_csv(ss, sample_frames(g));
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "alpha,beta,e1x,e1y,e1z,e2x,e2y,e2z,Nx,Ny,Nz");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 81);
}
