#pragma once

/// Forward problem for curvature-line data: integrate the Gauss-Weingarten
/// system Phi_alpha = Phi L, Phi_beta = Phi M for the frame (e1, e2, N),
/// then r_alpha = A1 e1, r_beta = A2 e2 for the positions.
///
/// Integration runs along the first beta-row and then up every column.
/// The opposite order is integrated too; the pointwise mismatch between
/// the two paths (closure residual) is nonzero only through truncation
/// when the data satisfy Gauss-Mainardi-Codazzi.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <utility>
#include <vector>

#include "shellcompat/grid.hpp"
#include "shellcompat/surface.hpp"

namespace shellcompat {

using Frame3 = Mat3;

/// max(|Phi^T Phi - I|_F, |det Phi - 1|).
inline double frame_defect(const Frame3& phi) {
  return std::max((phi.transpose() * phi - Mat3::Identity()).norm(), std::abs(phi.determinant() - 1.0));
}

struct VectorField3 {
  Grid2D grid;
  std::vector<Vec3> vectors;

  VectorField3() = default;
  explicit VectorField3(const Grid2D& g) : grid(g), vectors(g.size(), Vec3::Zero()) {}

  Vec3& operator()(int i, int j) { return vectors[grid.index(i, j)]; }
  const Vec3& operator()(int i, int j) const { return vectors[grid.index(i, j)]; }

  ScalarField component(int c) const {
    ScalarField f(grid);
    for (std::size_t k = 0; k < vectors.size(); ++k) f[k] = vectors[k][c];
    return f;
  }

  static VectorField3 from_components(const ScalarField& x, const ScalarField& y, const ScalarField& z) {
    VectorField3 out(x.grid());
    for (std::size_t k = 0; k < out.vectors.size(); ++k) out.vectors[k] = Vec3(x[k], y[k], z[k]);
    return out;
  }
};

struct FrameField {
  Grid2D grid;
  std::vector<Frame3> frames;

  FrameField() = default;
  explicit FrameField(const Grid2D& g) : grid(g), frames(g.size(), Frame3::Identity()) {}

  Frame3& operator()(int i, int j) { return frames[grid.index(i, j)]; }
  const Frame3& operator()(int i, int j) const { return frames[grid.index(i, j)]; }

  /// Column c of every frame (0: e1, 1: e2, 2: N).
  VectorField3 column(int c) const {
    VectorField3 out(grid);
    for (std::size_t k = 0; k < frames.size(); ++k) out.vectors[k] = frames[k].col(c);
    return out;
  }
};

inline VectorField3 diff_alpha(const VectorField3& v) {
  return VectorField3::from_components(diff_alpha(v.component(0)), diff_alpha(v.component(1)),
                                       diff_alpha(v.component(2)));
}

inline VectorField3 diff_beta(const VectorField3& v) {
  return VectorField3::from_components(diff_beta(v.component(0)), diff_beta(v.component(1)),
                                       diff_beta(v.component(2)));
}

inline Mat3 gw_L(double p, double Hc) {
  Mat3 L;
  L << 0, p, Hc,  //
      -p, 0, 0,   //
      -Hc, 0, 0;
  return L;
}

inline Mat3 gw_M(double q, double Kc) {
  Mat3 M;
  M << 0, -q, 0,  //
      q, 0, Kc,   //
      0, -Kc, 0;
  return M;
}

/// Gauss-Weingarten matrices (L, M) at grid node (i, j).
inline std::pair<Mat3, Mat3> gw_matrices(const SurfaceGeometry& g, int i, int j) {
  return {gw_L(g.p(i, j), g.Hc(i, j)), gw_M(g.q(i, j), g.Kc(i, j))};
}

inline Frame3 gram_schmidt(const Frame3& m) {
  Frame3 out;
  Vec3 e1 = m.col(0).normalized();
  Vec3 e2 = m.col(1) - m.col(1).dot(e1) * e1;
  e2.normalize();
  Vec3 n = m.col(2) - m.col(2).dot(e1) * e1 - m.col(2).dot(e2) * e2;
  n.normalize();
  out.col(0) = e1;
  out.col(1) = e2;
  out.col(2) = n;
  return out;
}

/// Orthonormality drift tolerated in a single step before renormalization.
inline constexpr double kMaxStepDrift = 1e-3;

namespace detail {

// Generator matrices along one grid line: values at nodes plus half-step
// values (exact closures when available, else the endpoint mean).
struct LineGenerators {
  std::vector<Mat3> node;
  std::vector<Mat3> half;
};

inline LineGenerators alpha_line(const SurfaceGeometry& g, int j) {
  const Grid2D& gr = g.grid();
  LineGenerators out;
  for (int i = 0; i < gr.n_alpha; ++i) out.node.push_back(gw_L(g.p(i, j), g.Hc(i, j)));
  for (int i = 0; i + 1 < gr.n_alpha; ++i) {
    if (g.analytic) {
      const double a = gr.alpha(i) + 0.5 * gr.h_alpha, b = gr.beta(j);
      out.half.push_back(gw_L(g.analytic->p(a, b), g.analytic->Hc(a, b)));
    } else {
      out.half.push_back(0.5 * (out.node[i] + out.node[i + 1]));
    }
  }
  return out;
}

inline LineGenerators beta_line(const SurfaceGeometry& g, int i) {
  const Grid2D& gr = g.grid();
  LineGenerators out;
  for (int j = 0; j < gr.n_beta; ++j) out.node.push_back(gw_M(g.q(i, j), g.Kc(i, j)));
  for (int j = 0; j + 1 < gr.n_beta; ++j) {
    if (g.analytic) {
      const double a = gr.alpha(i), b = gr.beta(j) + 0.5 * gr.h_beta;
      out.half.push_back(gw_M(g.analytic->q(a, b), g.analytic->Kc(a, b)));
    } else {
      out.half.push_back(0.5 * (out.node[j] + out.node[j + 1]));
    }
  }
  return out;
}

// One classical RK4 step of Phi' = Phi A(s) followed by Gram-Schmidt.
inline Frame3 rk4_frame_step(const Frame3& phi, const Mat3& a0, const Mat3& ah, const Mat3& a1,
                             double h) {
  const Mat3 k1 = phi * a0;
  const Mat3 k2 = (phi + 0.5 * h * k1) * ah;
  const Mat3 k3 = (phi + 0.5 * h * k2) * ah;
  const Mat3 k4 = (phi + h * k3) * a1;
  const Frame3 next = phi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if ((next.transpose() * next - Mat3::Identity()).norm() > kMaxStepDrift) {
    throw NumericalError("integrate_frames: orthonormality drift too large, refine the grid");
  }
  return gram_schmidt(next);
}

// Marches the frame along a grid line; out[k] is written for k = 0..n-1.
template <class Store>
void march(const Frame3& start, const LineGenerators& gen, double h, Store&& store) {
  Frame3 phi = start;
  store(0, phi);
  for (std::size_t k = 0; k + 1 < gen.node.size(); ++k) {
    phi = rk4_frame_step(phi, gen.node[k], gen.half[k], gen.node[k + 1], h);
    store(static_cast<int>(k + 1), phi);
  }
}

inline FrameField integrate_row_first(const SurfaceGeometry& g, const Frame3& phi0) {
  const Grid2D& gr = g.grid();
  FrameField out(gr);
  march(phi0, alpha_line(g, 0), gr.h_alpha, [&](int i, const Frame3& f) { out(i, 0) = f; });
  for (int i = 0; i < gr.n_alpha; ++i) {
    march(out(i, 0), beta_line(g, i), gr.h_beta, [&](int j, const Frame3& f) { out(i, j) = f; });
  }
  return out;
}

inline FrameField integrate_column_first(const SurfaceGeometry& g, const Frame3& phi0) {
  const Grid2D& gr = g.grid();
  FrameField out(gr);
  march(phi0, beta_line(g, 0), gr.h_beta, [&](int j, const Frame3& f) { out(0, j) = f; });
  for (int j = 0; j < gr.n_beta; ++j) {
    march(out(0, j), alpha_line(g, j), gr.h_alpha, [&](int i, const Frame3& f) { out(i, j) = f; });
  }
  return out;
}

}  // namespace detail

struct FrameIntegration {
  FrameField frames;        // row-first path
  ScalarField closure_res;  // |Phi_row-first - Phi_column-first|_F per node
};

inline FrameIntegration integrate_frames(const SurfaceGeometry& g, const Frame3& phi0) {
  if (frame_defect(phi0) > 1e-10) {
    throw std::invalid_argument("integrate_frames: initial frame is not a rotation");
  }
  FrameIntegration out;
  out.frames = detail::integrate_row_first(g, phi0);
  const FrameField other = detail::integrate_column_first(g, phi0);
  out.closure_res = ScalarField(g.grid());
  for (std::size_t k = 0; k < out.frames.frames.size(); ++k) {
    out.closure_res[k] = (out.frames.frames[k] - other.frames[k]).norm();
  }
  return out;
}

/// Integrates r_alpha = A1 e1 along the first row and r_beta = A2 e2 up the
/// columns with Simpson's rule. Midpoint tangents come from cubic Hermite
/// interpolation of the frame using the Gauss-Weingarten derivatives; the
/// midpoint metric coefficient uses the closure when present.
inline VectorField3 reconstruct_positions(const SurfaceGeometry& g, const FrameField& frames,
                                          const Vec3& r0) {
  const Grid2D& gr = g.grid();
  if (!(frames.grid == gr)) throw std::invalid_argument("reconstruct_positions: grid mismatch");
  VectorField3 r(gr);
  r(0, 0) = r0;

  const double ha = gr.h_alpha;
  for (int i = 0; i + 1 < gr.n_alpha; ++i) {
    const Frame3& f0 = frames(i, 0);
    const Frame3& f1 = frames(i + 1, 0);
    const Vec3 d0 = f0 * gw_L(g.p(i, 0), g.Hc(i, 0)).col(0);
    const Vec3 d1 = f1 * gw_L(g.p(i + 1, 0), g.Hc(i + 1, 0)).col(0);
    const Vec3 e_mid = 0.5 * (f0.col(0) + f1.col(0)) + ha / 8.0 * (d0 - d1);
    const double a_mid = g.analytic ? g.analytic->A1(gr.alpha(i) + 0.5 * ha, gr.beta(0))
                                    : 0.5 * (g.A1(i, 0) + g.A1(i + 1, 0));
    r(i + 1, 0) = r(i, 0) + ha / 6.0 *
                                (g.A1(i, 0) * f0.col(0) + 4.0 * a_mid * e_mid +
                                 g.A1(i + 1, 0) * f1.col(0));
  }

  const double hb = gr.h_beta;
  for (int i = 0; i < gr.n_alpha; ++i) {
    for (int j = 0; j + 1 < gr.n_beta; ++j) {
      const Frame3& f0 = frames(i, j);
      const Frame3& f1 = frames(i, j + 1);
      const Vec3 d0 = f0 * gw_M(g.q(i, j), g.Kc(i, j)).col(1);
      const Vec3 d1 = f1 * gw_M(g.q(i, j + 1), g.Kc(i, j + 1)).col(1);
      const Vec3 e_mid = 0.5 * (f0.col(1) + f1.col(1)) + hb / 8.0 * (d0 - d1);
      const double a_mid = g.analytic ? g.analytic->A2(gr.alpha(i), gr.beta(j) + 0.5 * hb)
                                      : 0.5 * (g.A2(i, j) + g.A2(i, j + 1));
      r(i, j + 1) = r(i, j) + hb / 6.0 *
                                  (g.A2(i, j) * f0.col(1) + 4.0 * a_mid * e_mid +
                                   g.A2(i, j + 1) * f1.col(1));
    }
  }
  return r;
}

/// res1 = |N_alpha + kappa1 r_alpha|, res2 = |N_beta + kappa2 r_beta| with
/// finite-difference derivatives of the sampled fields.
inline std::pair<ScalarField, ScalarField> weingarten_residual(const SurfaceGeometry& g,
                                                               const FrameField& frames,
                                                               const VectorField3& positions) {
  const Grid2D& gr = g.grid();
  if (!(frames.grid == gr) || !(positions.grid == gr)) {
    throw std::invalid_argument("weingarten_residual: grid mismatch");
  }
  const VectorField3 normal = frames.column(2);
  const VectorField3 Na = diff_alpha(normal), Nb = diff_beta(normal);
  const VectorField3 ra = diff_alpha(positions), rb = diff_beta(positions);
  ScalarField res1(gr), res2(gr);
  for (std::size_t k = 0; k < gr.size(); ++k) {
    const double kappa1 = -g.Hc[k] / g.A1[k];
    const double kappa2 = -g.Kc[k] / g.A2[k];
    res1[k] = (Na.vectors[k] + kappa1 * ra.vectors[k]).norm();
    res2[k] = (Nb.vectors[k] + kappa2 * rb.vectors[k]).norm();
  }
  return {res1, res2};
}

/// Exact frames and positions of a catalog surface sampled on its grid.
inline bool has_exact_chart(const SurfaceGeometry& g) {
  return g.analytic && g.analytic->position && g.analytic->frame;
}

inline FrameField sample_frames(const SurfaceGeometry& g) {
  if (!has_exact_chart(g)) throw std::invalid_argument("sample_frames: no analytic frame closure");
  const Grid2D& gr = g.grid();
  FrameField out(gr);
  for (int i = 0; i < gr.n_alpha; ++i)
    for (int j = 0; j < gr.n_beta; ++j) out(i, j) = g.analytic->frame(gr.alpha(i), gr.beta(j));
  return out;
}

inline VectorField3 sample_positions(const SurfaceGeometry& g) {
  if (!has_exact_chart(g)) throw std::invalid_argument("sample_positions: no analytic chart");
  const Grid2D& gr = g.grid();
  VectorField3 out(gr);
  for (int i = 0; i < gr.n_alpha; ++i)
    for (int j = 0; j < gr.n_beta; ++j) out(i, j) = g.analytic->position(gr.alpha(i), gr.beta(j));
  return out;
}

inline void write_positions_csv(std::ostream& os, const VectorField3& r) {
  os << "alpha,beta,x,y,z\n" << std::setprecision(17);
  for (int i = 0; i < r.grid.n_alpha; ++i) {
    for (int j = 0; j < r.grid.n_beta; ++j) {
      const Vec3& v = r(i, j);
      os << r.grid.alpha(i) << ',' << r.grid.beta(j) << ',' << v.x() << ',' << v.y() << ',' << v.z()
         << '\n';
    }
  }
}

inline void write_frames_csv(std::ostream& os, const FrameField& f) {
  os << "alpha,beta,e1x,e1y,e1z,e2x,e2y,e2z,Nx,Ny,Nz\n" << std::setprecision(17);
  for (int i = 0; i < f.grid.n_alpha; ++i) {
    for (int j = 0; j < f.grid.n_beta; ++j) {
      os << f.grid.alpha(i) << ',' << f.grid.beta(j);
      const Frame3& m = f(i, j);
      for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) os << ',' << m(r, c);
      os << '\n';
    }
  }
}

}  // namespace shellcompat
