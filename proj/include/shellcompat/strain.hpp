#pragma once

/// Linear thin-shell kinematics on a curvature-line middle surface:
/// strain-displacement relations, bending strains, the deformed-frame
/// quantities P, Q, H', K', the generators L', M' of the deformed frame
/// and the compatibility residuals that strains must satisfy to come from
/// a displacement field.
///
/// Every 1/R_i is evaluated as -kappa_i = Hc/A1 (resp. Kc/A2) so flat
/// regions need no special casing.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "shellcompat/frames.hpp"
#include "shellcompat/grid.hpp"
#include "shellcompat/surface.hpp"

namespace shellcompat {

/// Delta = u e1 + v e2 + w N.
struct DisplacementField {
  ScalarField u, v, w;

  void validate() const {
    require_same_grid(u, v, "DisplacementField");
    require_same_grid(u, w, "DisplacementField");
  }
};

struct StrainState {
  ScalarField eps1, eps2;        // normal strains
  ScalarField om1, om2, om;      // om = om1 + om2 is the shear strain
  ScalarField theta, psi;        // deflection angles
  ScalarField k1, k2, tau;       // change of curvature and twist
  ScalarField P, Q;              // deformed rotation coefficients
  ScalarField Hp, Kp;            // H' = -k1 A1, K' = -k2 A2

  static StrainState zeros(const Grid2D& g) {
    const ScalarField z(g, 0.0);
    return {z, z, z, z, z, z, z, z, z, z, z, z, z, z};
  }

  const Grid2D& grid() const { return eps1.grid(); }
};

/// Offset z of a layer r + z N inside a shell of thickness `thickness`.
struct LayerParams {
  double z = 0.0;
  double thickness = 1.0;

  void validate() const {
    if (!(thickness > 0.0)) throw std::invalid_argument("LayerParams: thickness must be positive");
    if (!(std::abs(z) < 0.5 * thickness)) {
      throw std::invalid_argument("LayerParams: layer must lie strictly inside the shell");
    }
  }
};

/// Infinitesimal rigid motion Delta = a + b x r.
struct RigidMotion {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
};

inline StrainState strains_from_displacement(const SurfaceGeometry& g, const DisplacementField& d) {
  d.validate();
  require_same_grid(g.A1, d.u, "strains_from_displacement");
  const ScalarField &u = d.u, &v = d.v, &w = d.w;
  StrainState s = StrainState::zeros(g.grid());
  s.eps1 = (diff_alpha(u) + g.p * v + g.Hc * w) / g.A1;
  s.eps2 = (diff_beta(v) + g.q * u + g.Kc * w) / g.A2;
  s.om1 = (diff_alpha(v) - g.p * u) / g.A1;
  s.om2 = (diff_beta(u) - g.q * v) / g.A2;
  s.om = s.om1 + s.om2;
  s.theta = (-diff_alpha(w) + g.Hc * u) / g.A1;
  s.psi = (-diff_beta(w) + g.Kc * v) / g.A2;
  return s;
}

/// Fills k1, k2, tau. tau uses the alpha-formula; the beta-formula is
/// returned as the mismatch tau_alpha - tau_beta, which vanishes (up to
/// truncation) whenever the angles come from a displacement.
inline std::pair<StrainState, ScalarField> bending_strains(const SurfaceGeometry& g, StrainState s) {
  s.k1 = -(diff_alpha(s.theta) + g.p * s.psi) / g.A1;
  s.k2 = -(diff_beta(s.psi) + g.q * s.theta) / g.A2;
  // omega2 / R1 = Hc omega2 / A1, omega1 / R2 = Kc omega1 / A2
  const ScalarField tau_a = (diff_alpha(s.psi) - g.p * s.theta + g.Hc * s.om2) / g.A1;
  const ScalarField tau_b = (diff_beta(s.theta) - g.q * s.psi + g.Kc * s.om1) / g.A2;
  s.tau = tau_a;
  return {std::move(s), tau_a - tau_b};
}

/// P and Q from the normal and shear strains:
///   P = ((A1 eps1)_b - (A2 om)_a - eps2 (A1)_b) / A2
///   Q = ((A2 eps2)_a - (A1 om)_b - eps1 (A2)_a) / A1
inline std::pair<ScalarField, ScalarField> pq_from_strains(const SurfaceGeometry& g,
                                                           const StrainState& s) {
  const ScalarField A1b = diff_beta(g.A1), A2a = diff_alpha(g.A2);
  ScalarField P = (diff_beta(g.A1 * s.eps1) - diff_alpha(g.A2 * s.om) - s.eps2 * A1b) / g.A2;
  ScalarField Q = (diff_alpha(g.A2 * s.eps2) - diff_beta(g.A1 * s.om) - s.eps1 * A2a) / g.A1;
  return {std::move(P), std::move(Q)};
}

/// Regrouped P and Q, each written as a bracket over A_i minus half a
/// shear derivative.
inline std::pair<ScalarField, ScalarField> pq_regrouped(const SurfaceGeometry& g, const StrainState& s) {
  const ScalarField A1b = diff_beta(g.A1), A2a = diff_alpha(g.A2);
  const ScalarField om_a = diff_alpha(s.om), om_b = diff_beta(s.om);
  ScalarField P = (g.A1 * diff_beta(s.eps1) + A1b * (s.eps1 - s.eps2) - 0.5 * g.A2 * om_a - A2a * s.om) /
                      g.A2 -
                  0.5 * om_a;
  ScalarField Q = (g.A2 * diff_alpha(s.eps2) + A2a * (s.eps2 - s.eps1) - 0.5 * g.A1 * om_b - A1b * s.om) /
                      g.A1 -
                  0.5 * om_b;
  return {std::move(P), std::move(Q)};
}

struct PqDiagnostics {
  ScalarField P_definition_mismatch;  // -((om1)_a + Hc psi) - P
  ScalarField Q_definition_mismatch;  // -((om2)_b + Kc theta) - Q
  ScalarField P_regrouped_mismatch;
  ScalarField Q_regrouped_mismatch;
};

/// Fills P, Q (strain form), H' = -k1 A1 and K' = -k2 A2. The mismatch
/// fields compare against the rotation-angle definition of P, Q and the
/// regrouped form; both vanish up to truncation for displacement-derived
/// states.
inline std::pair<StrainState, PqDiagnostics> pq_deformed(const SurfaceGeometry& g, StrainState s) {
  auto [P, Q] = pq_from_strains(g, s);
  s.P = std::move(P);
  s.Q = std::move(Q);
  s.Hp = -s.k1 * g.A1;
  s.Kp = -s.k2 * g.A2;
  const ScalarField P_def = -(diff_alpha(s.om1) + g.Hc * s.psi);
  const ScalarField Q_def = -(diff_beta(s.om2) + g.Kc * s.theta);
  auto [P_reg, Q_reg] = pq_regrouped(g, s);
  PqDiagnostics d{P_def - s.P, Q_def - s.Q, P_reg - s.P, Q_reg - s.Q};
  return {std::move(s), std::move(d)};
}

/// Strains, bending strains and deformed-frame quantities in one pass.
inline StrainState compute_strain_state(const SurfaceGeometry& g, const DisplacementField& d) {
  StrainState s = strains_from_displacement(g, d);
  s = bending_strains(g, std::move(s)).first;
  return pq_deformed(g, std::move(s)).first;
}

inline DisplacementField rigid_displacement(const FrameField& frames, const VectorField3& positions,
                                            const RigidMotion& m) {
  if (!(frames.grid == positions.grid)) throw std::invalid_argument("rigid_displacement: grid mismatch");
  const Grid2D& gr = frames.grid;
  DisplacementField d{ScalarField(gr), ScalarField(gr), ScalarField(gr)};
  for (std::size_t k = 0; k < gr.size(); ++k) {
    const Vec3 delta = m.a + m.b.cross(positions.vectors[k]);
    const Frame3& f = frames.frames[k];
    d.u[k] = delta.dot(f.col(0));
    d.v[k] = delta.dot(f.col(1));
    d.w[k] = delta.dot(f.col(2));
  }
  return d;
}

struct LayerStrains {
  ScalarField eps1z, eps2z, omz;
};

inline constexpr double kMinLayerDenominator = 1e-12;

inline LayerStrains layer_strains(const SurfaceGeometry& g, const StrainState& s, const LayerParams& layer) {
  layer.validate();
  const CurvatureSet c = curvatures(g);
  const double z = layer.z;
  const ScalarField d1 = 1.0 - z * c.kappa1;  // 1 + z / R1
  const ScalarField d2 = 1.0 - z * c.kappa2;
  const ScalarField d12 = 1.0 - 2.0 * z * c.meanH + z * z * c.gaussK;
  for (const ScalarField* d : {&d1, &d2, &d12}) {
    for (std::size_t k = 0; k < d->size(); ++k) {
      if (std::abs((*d)[k]) < kMinLayerDenominator) {
        throw NumericalError("layer_strains: layer passes through a center of curvature");
      }
    }
  }
  LayerStrains out;
  out.eps1z = (s.eps1 - z * s.k1) / d1;
  out.eps2z = (s.eps2 - z * s.k2) / d2;
  out.omz = ((1.0 - z * z * c.gaussK) * s.om + 2.0 * z * (1.0 + z * c.meanH) * s.tau) / d12;
  return out;
}

/// A 3x3 matrix per grid node, stored entrywise so each entry can be
/// differentiated as a scalar field.
struct MatrixField {
  std::array<ScalarField, 9> entries;

  explicit MatrixField(const Grid2D& g) { entries.fill(ScalarField(g, 0.0)); }

  ScalarField& operator()(int r, int c) { return entries[3 * r + c]; }
  const ScalarField& operator()(int r, int c) const { return entries[3 * r + c]; }
  const Grid2D& grid() const { return entries[0].grid(); }

  Mat3 at(int i, int j) const {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = (*this)(r, c)(i, j);
    return m;
  }

  void set(int i, int j, const Mat3& m) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) (*this)(r, c)(i, j) = m(r, c);
  }
};

inline MatrixField diff_alpha(const MatrixField& m) {
  MatrixField out(m.grid());
  for (int k = 0; k < 9; ++k) out.entries[k] = diff_alpha(m.entries[k]);
  return out;
}

inline MatrixField diff_beta(const MatrixField& m) {
  MatrixField out(m.grid());
  for (int k = 0; k < 9; ++k) out.entries[k] = diff_beta(m.entries[k]);
  return out;
}

inline MatrixField gw_L_field(const SurfaceGeometry& g) {
  MatrixField L(g.grid());
  L(0, 1) = g.p;
  L(0, 2) = g.Hc;
  L(1, 0) = -g.p;
  L(2, 0) = -g.Hc;
  return L;
}

inline MatrixField gw_M_field(const SurfaceGeometry& g) {
  MatrixField M(g.grid());
  M(0, 1) = -g.q;
  M(1, 0) = g.q;
  M(1, 2) = g.Kc;
  M(2, 1) = -g.Kc;
  return M;
}

/// Omega with Phi' = Phi (E + Omega).
inline MatrixField omega_field(const StrainState& s) {
  MatrixField W(s.grid());
  W(0, 1) = s.om2;
  W(0, 2) = s.theta;
  W(1, 0) = s.om1;
  W(1, 2) = s.psi;
  W(2, 0) = -s.theta;
  W(2, 1) = -s.psi;
  return W;
}

struct LmPrime {
  MatrixField L, M;
};

/// L' = Omega_a + [L, Omega], M' = Omega_b + [M, Omega].
inline LmPrime lm_prime_commutator_fields(const SurfaceGeometry& g, const StrainState& s) {
  const Grid2D& gr = g.grid();
  const MatrixField W = omega_field(s);
  const MatrixField Wa = diff_alpha(W), Wb = diff_beta(W);
  LmPrime out{MatrixField(gr), MatrixField(gr)};
  for (int i = 0; i < gr.n_alpha; ++i) {
    for (int j = 0; j < gr.n_beta; ++j) {
      const auto [L, M] = gw_matrices(g, i, j);
      const Mat3 w = W.at(i, j);
      out.L.set(i, j, Wa.at(i, j) + L * w - w * L);
      out.M.set(i, j, Wb.at(i, j) + M * w - w * M);
    }
  }
  return out;
}

/// Entrywise closed forms of L' and M' in terms of P, Q, H', K', tau, omega.
/// Entry (1,2) of M' is K'; the matrix computed directly from Omega has
/// psi_b + q theta there.
inline LmPrime lm_prime_explicit_fields(const SurfaceGeometry& g, const StrainState& s) {
  const Grid2D& gr = g.grid();
  LmPrime out{MatrixField(gr), MatrixField(gr)};
  MatrixField& L = out.L;
  L(0, 0) = g.p * s.om;
  L(0, 1) = s.P + diff_alpha(s.om);
  L(0, 2) = s.Hp;
  L(1, 0) = -s.P;
  L(1, 1) = -g.p * s.om;
  L(1, 2) = s.tau * g.A1 - g.Hc * s.om;
  L(2, 0) = -s.Hp;
  L(2, 1) = -s.tau * g.A1;
  MatrixField& M = out.M;
  M(0, 0) = -g.q * s.om;
  M(0, 1) = -s.Q;
  M(0, 2) = s.tau * g.A2 - g.Kc * s.om;
  M(1, 0) = s.Q + diff_beta(s.om);
  M(1, 1) = g.q * s.om;
  M(1, 2) = s.Kp;
  M(2, 0) = -s.tau * g.A2;
  M(2, 1) = -s.Kp;
  return out;
}

inline std::pair<Mat3, Mat3> lm_prime_commutator(const SurfaceGeometry& g, const StrainState& s, int i, int j) {
  const LmPrime f = lm_prime_commutator_fields(g, s);
  return {f.L.at(i, j), f.M.at(i, j)};
}

inline std::pair<Mat3, Mat3> lm_prime_explicit(const SurfaceGeometry& g, const StrainState& s, int i, int j) {
  const LmPrime f = lm_prime_explicit_fields(g, s);
  return {f.L.at(i, j), f.M.at(i, j)};
}

/// Largest entrywise |explicit - commutator| per node, for L' and M'.
inline std::pair<ScalarField, ScalarField> lm_prime_difference(const SurfaceGeometry& g, const StrainState& s) {
  const LmPrime a = lm_prime_commutator_fields(g, s);
  const LmPrime b = lm_prime_explicit_fields(g, s);
  ScalarField dL(g.grid(), 0.0), dM(g.grid(), 0.0);
  for (int k = 0; k < 9; ++k) {
    for (std::size_t n = 0; n < dL.size(); ++n) {
      dL[n] = std::max(dL[n], std::abs(a.L.entries[k][n] - b.L.entries[k][n]));
      dM[n] = std::max(dM[n], std::abs(a.M.entries[k][n] - b.M.entries[k][n]));
    }
  }
  return {dL, dM};
}

struct ResidualTriple {
  ScalarField r1, r2, r3;
};

/// Compatibility conditions for the six strains:
///   g1 = P_b + Q_a + om_ab + H' Kc + Hc K'
///   g2 = (H')_b - (P Kc + p K') - [(tau A2)_a + tau (A2)_a - om (Kc)_a]
///   g3 = (K')_a - (Q Hc + q H') - [(tau A1)_b + tau (A1)_b - om (Hc)_b]
inline ResidualTriple goldenweizer_residuals(const SurfaceGeometry& g, const StrainState& s) {
  const ScalarField om_ab = diff_beta(diff_alpha(s.om));
  ResidualTriple r;
  r.r1 = diff_beta(s.P) + diff_alpha(s.Q) + om_ab + s.Hp * g.Kc + g.Hc * s.Kp;
  r.r2 = diff_beta(s.Hp) - (s.P * g.Kc + g.p * s.Kp) -
         (diff_alpha(s.tau * g.A2) + s.tau * diff_alpha(g.A2) - s.om * diff_alpha(g.Kc));
  r.r3 = diff_alpha(s.Kp) - (s.Q * g.Hc + g.q * s.Hp) -
         (diff_beta(s.tau * g.A1) + s.tau * diff_beta(g.A1) - s.om * diff_beta(g.Hc));
  return r;
}

/// Per-node Frobenius norm of L'_b - M'_a - [L', M] - [L, M'].
inline ScalarField goldenweizer_matrix_residual(const SurfaceGeometry& g, const StrainState& s) {
  const LmPrime lm = lm_prime_explicit_fields(g, s);
  const MatrixField Lpb = diff_beta(lm.L), Mpa = diff_alpha(lm.M);
  const Grid2D& gr = g.grid();
  ScalarField out(gr);
  for (int i = 0; i < gr.n_alpha; ++i) {
    for (int j = 0; j < gr.n_beta; ++j) {
      const auto [L, M] = gw_matrices(g, i, j);
      const Mat3 Lp = lm.L.at(i, j), Mp = lm.M.at(i, j);
      const Mat3 r = Lpb.at(i, j) - Mpa.at(i, j) - (Lp * M - M * Lp) - (L * Mp - Mp * L);
      out(i, j) = r.norm();
    }
  }
  return out;
}

/// The same three conditions written with radii of curvature and the
/// normal strains directly:
///   n1 = -k1/R2 - k2/R1 + (1/(A1 A2)) [ d_a{Q~} + d_b{P~} ]  ( = g1 / (A1 A2) )
///   n2 = (A1(-k1))_b - (-k2)(A1)_b - (A2 tau)_a - tau (A2)_a + om (A2)_a / R1
///        - (1/R2)((A1 eps1)_b - (A2 om)_a - eps2 (A1)_b)             ( = g2 )
///   n3 = mirror of n2                                                ( = g3 )
/// where P~ = P + om_a / 2 and Q~ = Q + om_b / 2 in regrouped form.
inline ResidualTriple novozhilov_residuals(const SurfaceGeometry& g, const StrainState& s) {
  const CurvatureSet c = curvatures(g);
  const ScalarField inv_R1 = -c.kappa1, inv_R2 = -c.kappa2;
  const ScalarField A1b = diff_beta(g.A1), A2a = diff_alpha(g.A2);
  const ScalarField Pt = (g.A1 * diff_beta(s.eps1) + A1b * (s.eps1 - s.eps2) -
                          0.5 * g.A2 * diff_alpha(s.om) - A2a * s.om) /
                         g.A2;
  const ScalarField Qt = (g.A2 * diff_alpha(s.eps2) + A2a * (s.eps2 - s.eps1) -
                          0.5 * g.A1 * diff_beta(s.om) - A1b * s.om) /
                         g.A1;
  ResidualTriple r;
  r.r1 = -s.k1 * inv_R2 - s.k2 * inv_R1 + (diff_alpha(Qt) + diff_beta(Pt)) / (g.A1 * g.A2);
  r.r2 = diff_beta(-g.A1 * s.k1) + s.k2 * A1b - diff_alpha(g.A2 * s.tau) - s.tau * A2a +
         s.om * inv_R1 * A2a -
         inv_R2 * (diff_beta(g.A1 * s.eps1) - diff_alpha(g.A2 * s.om) - s.eps2 * A1b);
  r.r3 = diff_alpha(-g.A2 * s.k2) + s.k1 * A2a - diff_beta(g.A1 * s.tau) - s.tau * A1b +
         s.om * inv_R2 * A1b -
         inv_R1 * (diff_alpha(g.A2 * s.eps2) - diff_beta(g.A1 * s.om) - s.eps1 * A2a);
  return r;
}

/// n - rescaled g for each of the three conditions.
inline ResidualTriple compatibility_form_difference(const SurfaceGeometry& g, const StrainState& s) {
  const ResidualTriple gw = goldenweizer_residuals(g, s);
  const ResidualTriple nv = novozhilov_residuals(g, s);
  return {nv.r1 - gw.r1 / (g.A1 * g.A2), nv.r2 - gw.r2, nv.r3 - gw.r3};
}

/// t1, t2: the two tangential conditions of (R_a)_b = (R_b)_a (LHS - RHS);
/// t3: its normal component, an identity for displacement-derived angles.
inline ResidualTriple tangential_compat_residuals(const SurfaceGeometry& g, const StrainState& s) {
  const ScalarField A1b = diff_beta(g.A1), A2a = diff_alpha(g.A2);
  ResidualTriple r;
  r.r1 = diff_beta(g.A1 * s.eps1) - diff_alpha(g.A2 * s.om) - s.eps2 * A1b +
         (diff_alpha(s.om1) + g.Hc * s.psi) * g.A2;
  r.r2 = diff_alpha(g.A2 * s.eps2) - diff_beta(g.A1 * s.om) - s.eps1 * A2a +
         (diff_beta(s.om2) + g.Kc * s.theta) * g.A1;
  // (om1/R2 - om2/R1) A1 A2 = om1 Kc A1 - om2 Hc A2
  r.r3 = diff_beta(g.A1 * s.theta) - diff_alpha(g.A2 * s.psi) + s.om1 * g.Kc * g.A1 -
         s.om2 * g.Hc * g.A2;
  return r;
}

/// c1 = |R_a / A1 - ((1 + eps1) e1 + om1 e2 - theta N)|, c2 likewise for beta,
/// with R = r + Delta differentiated numerically.
inline std::pair<ScalarField, ScalarField> deformation_consistency(const SurfaceGeometry& g,
                                                                   const FrameField& frames,
                                                                   const VectorField3& positions,
                                                                   const DisplacementField& d) {
  const Grid2D& gr = g.grid();
  if (!(frames.grid == gr) || !(positions.grid == gr)) {
    throw std::invalid_argument("deformation_consistency: grid mismatch");
  }
  const StrainState s = strains_from_displacement(g, d);
  VectorField3 R(gr);
  for (std::size_t k = 0; k < gr.size(); ++k) {
    const Frame3& f = frames.frames[k];
    R.vectors[k] = positions.vectors[k] + d.u[k] * f.col(0) + d.v[k] * f.col(1) + d.w[k] * f.col(2);
  }
  const VectorField3 Ra = diff_alpha(R), Rb = diff_beta(R);
  ScalarField c1(gr), c2(gr);
  for (std::size_t k = 0; k < gr.size(); ++k) {
    const Frame3& f = frames.frames[k];
    const Vec3 ta = (1.0 + s.eps1[k]) * f.col(0) + s.om1[k] * f.col(1) - s.theta[k] * f.col(2);
    const Vec3 tb = s.om2[k] * f.col(0) + (1.0 + s.eps2[k]) * f.col(1) - s.psi[k] * f.col(2);
    c1[k] = (Ra.vectors[k] / g.A1[k] - ta).norm();
    c2[k] = (Rb.vectors[k] / g.A2[k] - tb).norm();
  }
  return {c1, c2};
}

/// max(1, largest |strain| over eps1, eps2, om, k1, k2, tau); residual
/// norms are divided by this in reports.
inline double strain_scale(const StrainState& s) {
  double m = 1.0;
  for (const ScalarField* f : {&s.eps1, &s.eps2, &s.om, &s.k1, &s.k2, &s.tau}) {
    m = std::max(m, f->max_abs());
  }
  return m;
}

}  // namespace shellcompat
