#pragma once

/// Integrable middle surfaces and their symmetries.
///
/// Three classes of curvature-line surfaces have a Gauss equation that is
/// a soliton equation for a single function u:
///
///   minimal          A1 = A2 = e^u, Hc = e^-u, Kc = -e^-u
///                    u_aa + u_bb = e^-2u                      (Liouville)
///   cmc (mean H)     A1 = A2 = e^u, Hc = -2H sinh u, Kc = -2H cosh u
///                    u_aa + u_bb + 4H^2 sinh u cosh u = 0     (elliptic sinh-Gordon)
///   pseudospherical  A1 = cos u, A2 = sin u, Hc = -sin(u)/rho, Kc = cos(u)/rho
///                    u_xx - u_yy = sin u cos u / rho^2        (sine-Gordon)
///
/// A symmetry S solves the linearized equation at u. Each symmetry yields
/// normal and bending strains with zero shear and twist that satisfy the
/// shell compatibility conditions.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "shellcompat/banded.hpp"
#include "shellcompat/cmc_profile.hpp"
#include "shellcompat/grid.hpp"
#include "shellcompat/strain.hpp"
#include "shellcompat/surface.hpp"

namespace shellcompat {

enum class SeedClass { minimal, cmc, pseudospherical };

inline const char* to_string(SeedClass c) {
  switch (c) {
    case SeedClass::minimal: return "minimal";
    case SeedClass::cmc: return "cmc";
    case SeedClass::pseudospherical: return "pseudospherical";
  }
  return "?";
}

inline SeedClass parse_seed_class(const std::string& s) {
  if (s == "minimal") return SeedClass::minimal;
  if (s == "cmc") return SeedClass::cmc;
  if (s == "pseudospherical") return SeedClass::pseudospherical;
  throw std::invalid_argument("unknown seed class '" + s + "'");
}

struct IntegrableSeed {
  SeedClass klass = SeedClass::minimal;
  ScalarField u;
  double rho = 1.0;             // pseudospherical: K = -1/rho^2
  double mean_curvature = 0.0;  // cmc
  std::string provenance;

  const Grid2D& grid() const { return u.grid(); }

  void validate() const {
    if (!u.all_finite()) throw std::invalid_argument("IntegrableSeed: u has non-finite values");
    if (klass == SeedClass::cmc && mean_curvature == 0.0) {
      throw std::invalid_argument("IntegrableSeed: cmc seed needs nonzero mean curvature");
    }
    if (klass == SeedClass::pseudospherical) {
      if (!(rho > 0.0)) throw std::invalid_argument("IntegrableSeed: rho must be positive");
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] < kPseudosphereMargin || u[k] > std::numbers::pi / 2 - kPseudosphereMargin) {
          throw std::invalid_argument(
              "IntegrableSeed: pseudospherical u must stay in [0.05, pi/2 - 0.05]");
        }
      }
    }
  }
};

/// S plus, optionally, the variations of A1, A2, kappa1, kappa2 it induces.
struct SymmetryField {
  ScalarField S;
  std::optional<ScalarField> S_A1, S_A2, S_kappa1, S_kappa2;
};

inline ScalarField pde_residual(const IntegrableSeed& seed) {
  const ScalarField& u = seed.u;
  switch (seed.klass) {
    case SeedClass::minimal:
      return diff2_alpha(u) + diff2_beta(u) - u.map([](double x) { return std::exp(-2.0 * x); });
    case SeedClass::cmc: {
      const double c = 4.0 * seed.mean_curvature * seed.mean_curvature;
      return diff2_alpha(u) + diff2_beta(u) +
             u.map([c](double x) { return c * std::sinh(x) * std::cosh(x); });
    }
    case SeedClass::pseudospherical: {
      const double c = 1.0 / (seed.rho * seed.rho);
      return diff2_alpha(u) - diff2_beta(u) -
             u.map([c](double x) { return c * std::sin(x) * std::cos(x); });
    }
  }
  throw std::logic_error("pde_residual: bad class");
}

/// Potential c(u) of the linearized operator: minimal 2e^-2u,
/// cmc 4H^2 cosh 2u, pseudospherical -cos(2u)/rho^2.
inline ScalarField linearized_potential(const IntegrableSeed& seed) {
  switch (seed.klass) {
    case SeedClass::minimal:
      return seed.u.map([](double x) { return 2.0 * std::exp(-2.0 * x); });
    case SeedClass::cmc: {
      const double c = 4.0 * seed.mean_curvature * seed.mean_curvature;
      return seed.u.map([c](double x) { return c * std::cosh(2.0 * x); });
    }
    case SeedClass::pseudospherical: {
      const double c = 1.0 / (seed.rho * seed.rho);
      return seed.u.map([c](double x) { return -c * std::cos(2.0 * x); });
    }
  }
  throw std::logic_error("linearized_potential: bad class");
}

inline ScalarField linearized_residual(const IntegrableSeed& seed, const ScalarField& S) {
  require_same_grid(seed.u, S, "linearized_residual");
  const ScalarField wave = seed.klass == SeedClass::pseudospherical ? diff2_alpha(S) - diff2_beta(S)
                                                                     : diff2_alpha(S) + diff2_beta(S);
  return wave + linearized_potential(seed) * S;
}

inline SurfaceGeometry geometry_from_seed(const IntegrableSeed& seed) {
  seed.validate();
  const ScalarField& u = seed.u;
  SurfaceGeometry g;
  g.name = std::string("seed:") + to_string(seed.klass);
  switch (seed.klass) {
    case SeedClass::minimal:
      g.A1 = u.map([](double x) { return std::exp(x); });
      g.A2 = g.A1;
      g.Hc = u.map([](double x) { return std::exp(-x); });
      g.Kc = -g.Hc;
      break;
    case SeedClass::cmc: {
      const double H = seed.mean_curvature;
      g.A1 = u.map([](double x) { return std::exp(x); });
      g.A2 = g.A1;
      g.Hc = u.map([H](double x) { return -2.0 * H * std::sinh(x); });
      g.Kc = u.map([H](double x) { return -2.0 * H * std::cosh(x); });
      break;
    }
    case SeedClass::pseudospherical: {
      const double r = seed.rho;
      g.A1 = u.map([](double x) { return std::cos(x); });
      g.A2 = u.map([](double x) { return std::sin(x); });
      g.Hc = u.map([r](double x) { return -std::sin(x) / r; });
      g.Kc = u.map([r](double x) { return std::cos(x) / r; });
      break;
    }
  }
  auto [p, q] = derive_pq(g.A1, g.A2);
  g.p = std::move(p);
  g.q = std::move(q);
  g.validate();
  return g;
}

/// Variations of A1, A2, kappa1, kappa2 under u -> u + eps S.
inline SymmetryField symmetry_components(const IntegrableSeed& seed, const ScalarField& S) {
  require_same_grid(seed.u, S, "symmetry_components");
  const ScalarField& u = seed.u;
  SymmetryField sym{S, {}, {}, {}, {}};
  switch (seed.klass) {
    case SeedClass::minimal: {
      const ScalarField e2 = u.map([](double x) { return std::exp(-2.0 * x); });
      sym.S_A1 = S * u.map([](double x) { return std::exp(x); });
      sym.S_A2 = *sym.S_A1;
      sym.S_kappa1 = 2.0 * S * e2;
      sym.S_kappa2 = -2.0 * S * e2;
      break;
    }
    case SeedClass::cmc: {
      const double H = seed.mean_curvature;
      const ScalarField e2 = u.map([](double x) { return std::exp(-2.0 * x); });
      sym.S_A1 = S * u.map([](double x) { return std::exp(x); });
      sym.S_A2 = *sym.S_A1;
      sym.S_kappa1 = 2.0 * H * S * e2;
      sym.S_kappa2 = -2.0 * H * S * e2;
      break;
    }
    case SeedClass::pseudospherical: {
      const double r = seed.rho;
      sym.S_A1 = -S * u.map([](double x) { return std::sin(x); });
      sym.S_A2 = S * u.map([](double x) { return std::cos(x); });
      sym.S_kappa1 = S * u.map([r](double x) { return 1.0 / (r * std::cos(x) * std::cos(x)); });
      sym.S_kappa2 = S * u.map([r](double x) { return 1.0 / (r * std::sin(x) * std::sin(x)); });
      break;
    }
  }
  return sym;
}

struct GenericStrains {
  ScalarField eps1, eps2, k1, k2;
};

/// eps_i = S_Ai / A_i, k_i = S_kappa_i + eps_i kappa_i.
inline GenericStrains strains_from_generic_symmetry(const SurfaceGeometry& g, const SymmetryField& sym) {
  if (!sym.S_A1 || !sym.S_A2 || !sym.S_kappa1 || !sym.S_kappa2) {
    throw std::invalid_argument("strains_from_generic_symmetry: symmetry components missing");
  }
  require_positive(g.A1, "strains_from_generic_symmetry: A1");
  require_positive(g.A2, "strains_from_generic_symmetry: A2");
  const CurvatureSet c = curvatures(g);
  GenericStrains out;
  out.eps1 = *sym.S_A1 / g.A1;
  out.eps2 = *sym.S_A2 / g.A2;
  out.k1 = *sym.S_kappa1 + out.eps1 * c.kappa1;
  out.k2 = *sym.S_kappa2 + out.eps2 * c.kappa2;
  return out;
}

struct SymmetryStrains {
  SurfaceGeometry geometry;
  StrainState state;
  double linearized_linf = 0.0;  // interior max of the linearized residual
  bool not_a_symmetry = false;   // linearized_linf above the warning threshold
};

/// Strains with om = om1 = om2 = tau = theta = psi = 0 and the closed-form
/// normal/bending strains of the seed's class. P, Q, H', K' are filled from
/// the strains.
inline SymmetryStrains strains_from_symmetry(const IntegrableSeed& seed, const ScalarField& S,
                                             double warn_threshold = 1e-2) {
  require_same_grid(seed.u, S, "strains_from_symmetry");
  SymmetryStrains out{geometry_from_seed(seed), StrainState::zeros(S.grid()), 0.0, false};
  const ScalarField& u = seed.u;
  StrainState& s = out.state;
  switch (seed.klass) {
    case SeedClass::minimal: {
      const ScalarField e2 = u.map([](double x) { return std::exp(-2.0 * x); });
      s.eps1 = S;
      s.eps2 = S;
      s.k1 = S * e2;
      s.k2 = -S * e2;
      break;
    }
    case SeedClass::cmc: {
      const double H = seed.mean_curvature;
      s.eps1 = S;
      s.eps2 = S;
      s.k1 = 2.0 * H * S * u.map([](double x) { return std::exp(-x) * std::cosh(x); });
      s.k2 = 2.0 * H * S * u.map([](double x) { return std::exp(-x) * std::sinh(x); });
      break;
    }
    case SeedClass::pseudospherical: {
      s.eps1 = -S * u.map([](double x) { return std::tan(x); });
      s.eps2 = S * u.map([](double x) { return 1.0 / std::tan(x); });
      s.k1 = S * (1.0 / seed.rho);
      s.k2 = s.k1;
      break;
    }
  }
  s = pq_deformed(out.geometry, std::move(s)).first;
  const Grid2D& gr = S.grid();
  const int trim = (gr.n_alpha > 2 && gr.n_beta > 2) ? 1 : 0;
  out.linearized_linf = field_norms(linearized_residual(seed, S), trim).linf;
  out.not_a_symmetry = out.linearized_linf > warn_threshold;
  return out;
}

struct EllipticSolution {
  SymmetryField symmetry;
  double condition_estimate = 0.0;
};

/// Solves S_aa + S_bb + c(u) S = 0 (5-point stencil) with Dirichlet data
/// taken from the boundary ring of `boundary_values`. Only the elliptic
/// classes are accepted. The potential is positive, so the operator is
/// not definite; a condition estimate above `max_condition` is reported
/// as NumericalError instead of returning a meaningless field.
inline EllipticSolution solve_linearized_elliptic(const IntegrableSeed& seed,
                                                  const ScalarField& boundary_values,
                                                  double max_condition = 1e12) {
  if (seed.klass == SeedClass::pseudospherical) {
    throw std::invalid_argument("solve_linearized_elliptic: pseudospherical linearization is hyperbolic");
  }
  seed.validate();
  require_same_grid(seed.u, boundary_values, "solve_linearized_elliptic");
  const Grid2D& gr = seed.grid();
  const ScalarField c = linearized_potential(seed);

  const int ni = gr.n_alpha - 2, nj = gr.n_beta - 2;
  // The shorter direction is the fast index so the bandwidth is minimal.
  const bool beta_fast = nj <= ni;
  const int band = beta_fast ? nj : ni;
  auto unknown = [&](int i, int j) {  // interior node -> unknown index
    return beta_fast ? (i - 1) * nj + (j - 1) : (j - 1) * ni + (i - 1);
  };

  const int n = ni * nj;
  BandMatrix A(n, band, band);
  std::vector<double> rhs(n, 0.0);
  const double ia = 1.0 / (gr.h_alpha * gr.h_alpha), ib = 1.0 / (gr.h_beta * gr.h_beta);
  for (int i = 1; i <= ni; ++i) {
    for (int j = 1; j <= nj; ++j) {
      const int row = unknown(i, j);
      A(row, row) = -2.0 * ia - 2.0 * ib + c(i, j);
      const int nbr[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      const double w[4] = {ia, ia, ib, ib};
      for (int k = 0; k < 4; ++k) {
        const int ii = nbr[k][0], jj = nbr[k][1];
        if (ii == 0 || ii == gr.n_alpha - 1 || jj == 0 || jj == gr.n_beta - 1) {
          rhs[row] -= w[k] * boundary_values(ii, jj);
        } else {
          A(row, unknown(ii, jj)) = w[k];
        }
      }
    }
  }

  const BandSolution sol = solve_banded(std::move(A), std::move(rhs), max_condition);
  ScalarField S = boundary_values;
  for (int i = 1; i <= ni; ++i)
    for (int j = 1; j <= nj; ++j) S(i, j) = sol.x[unknown(i, j)];
  return {symmetry_components(seed, S), sol.condition()};
}

/// Seed selector; the ranges are the (alpha, beta) domain.
struct SeedSpec {
  std::string name = "catenoid_log_cosh";
  double alpha_min = -1.0, alpha_max = 1.0;
  double beta_min = 0.0, beta_max = std::numbers::pi / 2;
  double rho = 1.0;             // sg_kink
  double mean_curvature = 0.5;  // cmc_ode_profile
  double first_integral = 0.6;  // cmc_ode_profile
};

inline SeedSpec default_seed_spec(const std::string& name) {
  SeedSpec s;
  s.name = name;
  if (name == "catenoid_log_cosh") {
    s.alpha_min = -1.0, s.alpha_max = 1.0, s.beta_min = 0.0, s.beta_max = std::numbers::pi / 2;
  } else if (name == "sg_kink") {
    s.alpha_min = -3.0, s.alpha_max = -0.4, s.beta_min = 0.0, s.beta_max = 1.0;
  } else if (name == "cmc_ode_profile") {
    s.alpha_min = 0.0, s.alpha_max = 2.0, s.beta_min = 0.0, s.beta_max = 1.0;
  } else {
    throw std::invalid_argument("unknown seed '" + name + "'");
  }
  return s;
}

struct CatalogSeed {
  IntegrableSeed seed;
  std::optional<ScalarField> exact_symmetry;
  double invariant_drift = 0.0;  // cmc_ode_profile only
};

inline CatalogSeed seed_catalog(const SeedSpec& spec, int n_alpha, int n_beta) {
  const Grid2D gr = Grid2D::spanning(n_alpha, n_beta, spec.alpha_min, spec.alpha_max, spec.beta_min,
                                     spec.beta_max);
  CatalogSeed out;
  if (spec.name == "catenoid_log_cosh") {
    out.seed = {SeedClass::minimal, ScalarField::sample(gr, [](double a, double) { return std::log(std::cosh(a)); }),
                1.0, 0.0, "u = ln cosh(alpha), S = tanh(alpha)"};
    out.exact_symmetry = ScalarField::sample(gr, [](double a, double) { return std::tanh(a); });
  } else if (spec.name == "sg_kink") {
    if (!(spec.alpha_max < 0.0)) throw std::invalid_argument("sg_kink: x-range must be negative");
    const double rho = spec.rho;
    out.seed = {SeedClass::pseudospherical,
                ScalarField::sample(gr, [rho](double x, double) { return kink_angle(x, rho); }), rho, 0.0,
                "u = 2 arctan e^(x/rho), S = sech(x/rho)/rho"};
    out.exact_symmetry =
        ScalarField::sample(gr, [rho](double x, double) { return 1.0 / (rho * std::cosh(x / rho)); });
  } else if (spec.name == "cmc_ode_profile") {
    const CmcProfile prof =
        integrate_cmc_profile(spec.mean_curvature, spec.first_integral, gr.h_alpha, gr.n_alpha);
    ScalarField u(gr), S(gr);
    for (int i = 0; i < gr.n_alpha; ++i) {
      for (int j = 0; j < gr.n_beta; ++j) {
        u(i, j) = prof.u[i];
        S(i, j) = prof.du[i];
      }
    }
    out.seed = {SeedClass::cmc, std::move(u), 1.0, spec.mean_curvature,
                "RK4 profile of u'' = -2H^2 sinh 2u, S = u'"};
    out.exact_symmetry = std::move(S);
    out.invariant_drift = prof.max_invariant_drift;
  } else {
    throw std::invalid_argument("unknown seed '" + spec.name + "'");
  }
  out.seed.validate();
  return out;
}

inline CatalogSeed seed_catalog(const std::string& name, int n) {
  return seed_catalog(default_seed_spec(name), n, n);
}

}  // namespace shellcompat
