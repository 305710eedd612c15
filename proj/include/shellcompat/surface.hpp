#pragma once

/// Curvature-line surface data (A1, A2, p, q, H, K), derived curvatures,
/// Gauss-Mainardi-Codazzi residuals and a catalog of analytic surfaces.
///
/// Sign convention: the normal derivatives are N_alpha = Hc e1 and
/// N_beta = Kc e2, with Hc = -kappa1 A1 = A1 / R1 and Kc = -kappa2 A2 = A2 / R2.
/// Principal curvatures are therefore kappa_i = -1 / R_i; a unit sphere
/// with outward normal has kappa1 = kappa2 = -1. Several textbooks use the
/// opposite sign.

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "shellcompat/cmc_profile.hpp"
#include "shellcompat/grid.hpp"

namespace shellcompat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using ScalarFn = std::function<double(double, double)>;

/// Exact closures for a catalog surface. The six coefficient closures are
/// always present; position and frame are present only where the chart is
/// known in closed form.
struct AnalyticSurface {
  ScalarFn A1, A2, p, q, Hc, Kc;
  std::function<Vec3(double, double)> position;
  std::function<Mat3(double, double)> frame;  // columns e1, e2, N
};

struct SurfaceGeometry {
  std::string name;
  ScalarField A1, A2, p, q, Hc, Kc;
  std::optional<AnalyticSurface> analytic;

  const Grid2D& grid() const { return A1.grid(); }

  void validate() const {
    for (const ScalarField* f : {&A2, &p, &q, &Hc, &Kc}) {
      require_same_grid(A1, *f, "SurfaceGeometry");
    }
    for (std::size_t k = 0; k < A1.size(); ++k) {
      if (!(A1[k] > 0.0) || !(A2[k] > 0.0)) {
        throw std::invalid_argument("SurfaceGeometry: A1 and A2 must be positive");
      }
    }
  }
};

struct CurvatureSet {
  ScalarField kappa1, kappa2;
  ScalarField meanH, gaussK;
  ScalarField R1, R2;  // +inf where the matching kappa vanishes
};

inline void require_positive(const ScalarField& f, const char* what) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(f[k] > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

/// p = (A1)_beta / A2, q = (A2)_alpha / A1.
inline std::pair<ScalarField, ScalarField> derive_pq(const ScalarField& A1, const ScalarField& A2) {
  require_same_grid(A1, A2, "derive_pq");
  require_positive(A1, "derive_pq: A1");
  require_positive(A2, "derive_pq: A2");
  return {diff_beta(A1) / A2, diff_alpha(A2) / A1};
}

struct GmcResiduals {
  ScalarField gauss;     // p_b + q_a + Hc Kc
  ScalarField codazzi1;  // (Hc)_b - p Kc
  ScalarField codazzi2;  // (Kc)_a - q Hc
};

inline GmcResiduals gmc_residuals(const SurfaceGeometry& g) {
  return {diff_beta(g.p) + diff_alpha(g.q) + g.Hc * g.Kc,
          diff_beta(g.Hc) - g.p * g.Kc,
          diff_alpha(g.Kc) - g.q * g.Hc};
}

inline CurvatureSet curvatures(const SurfaceGeometry& g) {
  require_positive(g.A1, "curvatures: A1");
  require_positive(g.A2, "curvatures: A2");
  CurvatureSet c;
  c.kappa1 = -g.Hc / g.A1;
  c.kappa2 = -g.Kc / g.A2;
  c.meanH = 0.5 * (c.kappa1 + c.kappa2);
  c.gaussK = c.kappa1 * c.kappa2;
  auto radius = [](double k) {
    return k == 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / k;
  };
  c.R1 = c.kappa1.map(radius);
  c.R2 = c.kappa2.map(radius);
  return c;
}

/// Catalog selector with the parameter set every entry draws from.
struct SurfaceSpec {
  std::string name = "sphere";
  double alpha_min = 0.0, alpha_max = 1.0;
  double beta_min = 0.0, beta_max = 1.0;
  double radius = 1.0;          // sphere
  double rho = 1.0;             // pseudosphere_kink
  double mean_curvature = 0.5;  // cmc_profile
  double first_integral = 0.6;  // cmc_profile, C in (u')^2 + 2H^2 cosh 2u = C
  double hc_scale = 1.0;        // multiplies Hc (negative control when != 1)
};

/// Default parameter ranges for each catalog entry.
inline SurfaceSpec default_surface_spec(const std::string& name) {
  using std::numbers::pi;
  SurfaceSpec s;
  s.name = name;
  if (name == "plane") {
    s.alpha_min = 0.0, s.alpha_max = 1.0, s.beta_min = 0.0, s.beta_max = 1.0;
  } else if (name == "sphere") {
    s.alpha_min = pi / 6, s.alpha_max = 5 * pi / 6, s.beta_min = 0.0, s.beta_max = pi / 2;
  } else if (name == "catenoid") {
    s.alpha_min = -1.0, s.alpha_max = 1.0, s.beta_min = 0.0, s.beta_max = pi / 2;
  } else if (name == "pseudosphere_kink") {
    s.alpha_min = -3.0, s.alpha_max = -0.4, s.beta_min = 0.0, s.beta_max = 1.0;
  } else if (name == "cmc_profile") {
    s.alpha_min = 0.0, s.alpha_max = 2.0, s.beta_min = 0.0, s.beta_max = 1.0;
  } else {
    throw std::invalid_argument("unknown catalog surface '" + name + "'");
  }
  return s;
}

/// Chart margin for the pseudospherical ansatz: tan u and cot u appear in
/// the strain formulas, so u must stay inside [margin, pi/2 - margin].
inline constexpr double kPseudosphereMargin = 0.05;

inline double kink_angle(double x, double rho) { return 2.0 * std::atan(std::exp(x / rho)); }

namespace detail {

inline SurfaceGeometry sample_analytic(std::string name, const Grid2D& grid, AnalyticSurface a) {
  SurfaceGeometry g;
  g.name = std::move(name);
  g.A1 = ScalarField::sample(grid, a.A1);
  g.A2 = ScalarField::sample(grid, a.A2);
  g.p = ScalarField::sample(grid, a.p);
  g.q = ScalarField::sample(grid, a.q);
  g.Hc = ScalarField::sample(grid, a.Hc);
  g.Kc = ScalarField::sample(grid, a.Kc);
  g.analytic = std::move(a);
  return g;
}

inline AnalyticSurface plane_closures() {
  AnalyticSurface a;
  a.A1 = a.A2 = [](double, double) { return 1.0; };
  a.p = a.q = a.Hc = a.Kc = [](double, double) { return 0.0; };
  a.position = [](double x, double y) { return Vec3(x, y, 0.0); };
  a.frame = [](double, double) { return Mat3::Identity().eval(); };
  return a;
}

inline AnalyticSurface sphere_closures(double R) {
  AnalyticSurface a;
  a.A1 = [R](double, double) { return R; };
  a.A2 = [R](double t, double) { return R * std::sin(t); };
  a.p = [](double, double) { return 0.0; };
  a.q = [](double t, double) { return std::cos(t); };
  a.Hc = [](double, double) { return 1.0; };
  a.Kc = [](double t, double) { return std::sin(t); };
  a.position = [R](double t, double f) {
    return Vec3(R * std::sin(t) * std::cos(f), R * std::sin(t) * std::sin(f), R * std::cos(t));
  };
  a.frame = [](double t, double f) {
    Mat3 m;
    m.col(0) = Vec3(std::cos(t) * std::cos(f), std::cos(t) * std::sin(f), -std::sin(t));
    m.col(1) = Vec3(-std::sin(f), std::cos(f), 0.0);
    m.col(2) = Vec3(std::sin(t) * std::cos(f), std::sin(t) * std::sin(f), std::cos(t));
    return m;
  };
  return a;
}

inline AnalyticSurface catenoid_closures() {
  AnalyticSurface a;
  a.A1 = a.A2 = [](double x, double) { return std::cosh(x); };
  a.p = [](double, double) { return 0.0; };
  a.q = [](double x, double) { return std::tanh(x); };
  a.Hc = [](double x, double) { return 1.0 / std::cosh(x); };
  a.Kc = [](double x, double) { return -1.0 / std::cosh(x); };
  a.position = [](double x, double y) {
    return Vec3(std::cosh(x) * std::cos(y), std::cosh(x) * std::sin(y), x);
  };
  a.frame = [](double x, double y) {
    const double th = std::tanh(x), sh = 1.0 / std::cosh(x);
    Mat3 m;
    m.col(0) = Vec3(th * std::cos(y), th * std::sin(y), sh);
    m.col(1) = Vec3(-std::sin(y), std::cos(y), 0.0);
    m.col(2) = Vec3(-sh * std::cos(y), -sh * std::sin(y), th);
    return m;
  };
  return a;
}

// Static sine-Gordon kink u = 2 arctan e^{x/rho}: sin u = sech(x/rho),
// cos u = -tanh(x/rho).
inline AnalyticSurface kink_closures(double rho) {
  AnalyticSurface a;
  a.A1 = [rho](double x, double) { return -std::tanh(x / rho); };
  a.A2 = [rho](double x, double) { return 1.0 / std::cosh(x / rho); };
  a.p = [](double, double) { return 0.0; };
  a.q = [rho](double x, double) { return 1.0 / (rho * std::cosh(x / rho)); };
  a.Hc = [rho](double x, double) { return -1.0 / (rho * std::cosh(x / rho)); };
  a.Kc = [rho](double x, double) { return -std::tanh(x / rho) / rho; };
  return a;
}

}  // namespace detail

/// Multiplies Hc (field and closure) by `factor`. With factor != 1 the
/// result violates Gauss-Mainardi-Codazzi; used as a negative control.
inline SurfaceGeometry scale_hc(SurfaceGeometry g, double factor) {
  g.Hc *= factor;
  if (g.analytic) {
    ScalarFn base = g.analytic->Hc;
    g.analytic->Hc = [base, factor](double a, double b) { return factor * base(a, b); };
  }
  return g;
}

inline SurfaceGeometry make_catalog_surface(const SurfaceSpec& spec, int n_alpha, int n_beta) {
  const Grid2D grid = Grid2D::spanning(n_alpha, n_beta, spec.alpha_min, spec.alpha_max,
                                       spec.beta_min, spec.beta_max);
  SurfaceGeometry g;
  if (spec.name == "plane") {
    g = detail::sample_analytic("plane", grid, detail::plane_closures());
  } else if (spec.name == "sphere") {
    if (!(spec.radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
    if (!(spec.alpha_min > 0.0) || !(spec.alpha_max < std::numbers::pi)) {
      throw std::invalid_argument("sphere: theta range must stay inside (0, pi)");
    }
    g = detail::sample_analytic("sphere", grid, detail::sphere_closures(spec.radius));
  } else if (spec.name == "catenoid") {
    g = detail::sample_analytic("catenoid", grid, detail::catenoid_closures());
  } else if (spec.name == "pseudosphere_kink") {
    if (!(spec.rho > 0.0)) throw std::invalid_argument("pseudosphere_kink: rho must be positive");
    const double lo = kink_angle(spec.alpha_min, spec.rho);
    const double hi = kink_angle(spec.alpha_max, spec.rho);
    if (lo < kPseudosphereMargin || hi > std::numbers::pi / 2 - kPseudosphereMargin) {
      throw std::invalid_argument(
          "pseudosphere_kink: x-range leaves the chart (u must stay in [0.05, pi/2 - 0.05])");
    }
    g = detail::sample_analytic("pseudosphere_kink", grid, detail::kink_closures(spec.rho));
  } else if (spec.name == "cmc_profile") {
    const CmcProfile prof = integrate_cmc_profile(spec.mean_curvature, spec.first_integral,
                                                  grid.h_alpha, grid.n_alpha);
    const double H = spec.mean_curvature;
    auto along_alpha = [&grid](const std::vector<double>& col, auto f) {
      ScalarField out(grid);
      for (int i = 0; i < grid.n_alpha; ++i)
        for (int j = 0; j < grid.n_beta; ++j) out(i, j) = f(col[i]);
      return out;
    };
    g.name = "cmc_profile";
    g.A1 = along_alpha(prof.u, [](double u) { return std::exp(u); });
    g.A2 = g.A1;
    g.p = ScalarField(grid, 0.0);
    g.q = along_alpha(prof.du, [](double du) { return du; });
    g.Hc = along_alpha(prof.u, [H](double u) { return -2.0 * H * std::sinh(u); });
    g.Kc = along_alpha(prof.u, [H](double u) { return -2.0 * H * std::cosh(u); });
  } else {
    throw std::invalid_argument("unknown catalog surface '" + spec.name + "'");
  }
  if (spec.hc_scale != 1.0) g = scale_hc(std::move(g), spec.hc_scale);
  g.validate();
  return g;
}

inline SurfaceGeometry make_catalog_surface(const std::string& name, int n) {
  return make_catalog_surface(default_surface_spec(name), n, n);
}

// CSV bundle: grid.csv plus one field dump per coefficient.

inline constexpr const char* kGeometryFieldNames[] = {"A1", "A2", "p", "q", "Hc", "Kc"};

inline void write_geometry_bundle(const std::filesystem::path& dir, const SurfaceGeometry& g) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "grid.csv");
    const Grid2D& gr = g.grid();
    os << "n_alpha,n_beta,alpha0,beta0,h_alpha,h_beta\n" << std::setprecision(17) << gr.n_alpha
       << ',' << gr.n_beta << ',' << gr.alpha0 << ',' << gr.beta0 << ',' << gr.h_alpha << ','
       << gr.h_beta << '\n';
  }
  const ScalarField* fields[] = {&g.A1, &g.A2, &g.p, &g.q, &g.Hc, &g.Kc};
  for (int k = 0; k < 6; ++k) {
    std::ofstream os(dir / (std::string(kGeometryFieldNames[k]) + ".csv"));
    write_field_csv(os, *fields[k]);
  }
}

inline Grid2D read_grid_csv(std::istream& is) {
  std::string header, row;
  if (!std::getline(is, header) || !std::getline(is, row)) {
    throw std::invalid_argument("grid csv: expected header and one data row");
  }
  if (header.rfind("n_alpha,n_beta,alpha0,beta0,h_alpha,h_beta", 0) != 0) {
    throw std::invalid_argument("grid csv: bad header");
  }
  std::replace(row.begin(), row.end(), ',', ' ');
  std::istringstream in(row);
  int na = 0, nb = 0;
  double a0 = 0, b0 = 0, ha = 0, hb = 0;
  if (!(in >> na >> nb >> a0 >> b0 >> ha >> hb)) throw std::invalid_argument("grid csv: bad row");
  return Grid2D(na, nb, a0, b0, ha, hb);
}

inline SurfaceGeometry load_geometry_bundle(const std::filesystem::path& dir) {
  std::ifstream gs(dir / "grid.csv");
  if (!gs) throw std::invalid_argument("geometry bundle: missing grid.csv in " + dir.string());
  const Grid2D grid = read_grid_csv(gs);
  SurfaceGeometry g;
  g.name = "csv:" + dir.string();
  ScalarField* fields[] = {&g.A1, &g.A2, &g.p, &g.q, &g.Hc, &g.Kc};
  for (int k = 0; k < 6; ++k) {
    std::ifstream fs(dir / (std::string(kGeometryFieldNames[k]) + ".csv"));
    if (!fs) throw std::invalid_argument(std::string("geometry bundle: missing ") + kGeometryFieldNames[k]);
    ScalarField f = read_field_csv(fs);
    const Grid2D& fg = f.grid();
    if (fg.n_alpha != grid.n_alpha || fg.n_beta != grid.n_beta ||
        std::abs(fg.h_alpha - grid.h_alpha) > 1e-9 * grid.h_alpha ||
        std::abs(fg.h_beta - grid.h_beta) > 1e-9 * grid.h_beta) {
      throw std::invalid_argument(std::string("geometry bundle: grid mismatch in ") +
                                  kGeometryFieldNames[k]);
    }
    *fields[k] = ScalarField(grid, std::vector<double>(f.values().begin(), f.values().end()));
  }
  g.validate();
  return g;
}

}  // namespace shellcompat
