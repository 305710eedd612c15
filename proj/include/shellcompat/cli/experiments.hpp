#pragma once

// Experiment drivers behind the command-line tool. Each driver evaluates a
// set of named residual fields on every configured grid and turns them
// into convergence studies.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shellcompat/cli/config.hpp"
#include "shellcompat/convergence.hpp"
#include "shellcompat/frames.hpp"
#include "shellcompat/integrable.hpp"
#include "shellcompat/strain.hpp"
#include "shellcompat/surface.hpp"

namespace shellcompat::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct ResidualReport {
  std::string experiment;
  bool negative_control = false;
  std::vector<int> grids;
  std::vector<ResidualStudy> studies;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, ScalarField>> dumps;  // "<residual>_<n>" -> field
  IniData config_echo;
  double wall_time_s = 0.0;
  bool pass = false;
};

/// One residual field evaluated on one grid.
struct ResidualField {
  std::string name;
  std::string family;
  int depth;  // nested difference quotients; sets the default trim and the rounding floor
  ScalarField field;
  OrderWindow window;
  double scale = 1.0;
  int extra_trim = 0;
};

namespace detail {

inline OrderWindow window_for(const RunConfig& cfg, OrderWindow base) {
  if (cfg.min_order) base.min_order = *cfg.min_order;
  if (cfg.max_order) base.max_order = *cfg.max_order;
  base.abs_floor = cfg.abs_floor;
  base.single_grid_tol = cfg.single_grid_tol;
  return base;
}

inline double geometry_scale(const SurfaceGeometry& g) {
  double m = 1.0;
  for (const ScalarField* f : {&g.A1, &g.A2, &g.p, &g.q, &g.Hc, &g.Kc}) m = std::max(m, f->max_abs());
  return m;
}

/// Collects per-grid residual fields into studies keyed by residual name,
/// in first-seen order.
class StudyCollector {
 public:
  StudyCollector(const RunConfig& cfg, ResidualReport& rep) : cfg_(cfg), rep_(rep) {}

  void add(int n, ResidualField r) {
    auto it = index_.find(r.name);
    if (it == index_.end()) {
      ResidualStudy st;
      st.name = r.name;
      st.family = r.family;
      st.depth = r.depth;
      st.scale = r.scale;
      st.window = r.window;
      it = index_.emplace(r.name, studies_.size()).first;
      studies_.push_back(std::move(st));
    }
    ResidualStudy& st = studies_[it->second];
    const int trim = cfg_.trim ? *cfg_.trim : r.depth + r.extra_trim;
    add_sample(st, r.field, trim);
    if (cfg_.format != "json") rep_.dumps.emplace_back(r.name + "_" + std::to_string(n), std::move(r.field));
  }

  void finish() {
    for (auto& st : studies_) {
      evaluate(st);
      rep_.studies.push_back(std::move(st));
    }
    studies_.clear();
    index_.clear();
  }

 private:
  const RunConfig& cfg_;
  ResidualReport& rep_;
  std::vector<ResidualStudy> studies_;
  std::map<std::string, std::size_t> index_;
};

inline void add_gmc(std::vector<ResidualField>& out, const SurfaceGeometry& g, int depth, OrderWindow w,
                    const std::string& prefix = "") {
  GmcResiduals r = gmc_residuals(g);
  const double sc = geometry_scale(g);
  out.push_back({prefix + "gauss", "gmc", depth, std::move(r.gauss), w, sc});
  out.push_back({prefix + "codazzi1", "gmc", depth, std::move(r.codazzi1), w, sc});
  out.push_back({prefix + "codazzi2", "gmc", depth, std::move(r.codazzi2), w, sc});
}

inline void add_goldenweizer(std::vector<ResidualField>& out, const SurfaceGeometry& g, const StrainState& s,
                             OrderWindow w, int extra_trim = 0) {
  const double sc = strain_scale(s) * geometry_scale(g);
  ResidualTriple r = goldenweizer_residuals(g, s);
  out.push_back({"goldenweizer1", "goldenweizer", 3, std::move(r.r1), w, sc, extra_trim});
  out.push_back({"goldenweizer2", "goldenweizer", 3, std::move(r.r2), w, sc, extra_trim});
  out.push_back({"goldenweizer3", "goldenweizer", 3, std::move(r.r3), w, sc, extra_trim});
  out.push_back({"goldenweizer_matrix", "goldenweizer", 3, goldenweizer_matrix_residual(g, s), w, sc, extra_trim});
}

}  // namespace detail

/// Geometry for one grid size: the catalog surface, or the CSV bundle
/// (whose own grid overrides the grid list).
inline SurfaceGeometry build_surface(const RunConfig& cfg, int n) {
  SurfaceGeometry g = cfg.bundle.empty() ? make_catalog_surface(cfg.surface, n, n)
                                         : load_geometry_bundle(cfg.bundle);
  return g;
}

inline std::vector<int> effective_grids(const RunConfig& cfg) {
  if (!cfg.bundle.empty()) return {load_geometry_bundle(cfg.bundle).grid().n_alpha};
  if (cfg.displacement.kind == "csv") {
    std::ifstream is(std::filesystem::path(cfg.displacement.dir) / "u.csv");
    if (!is) throw ConfigError("cannot open displacement u.csv");
    return {read_field_csv(is).grid().n_alpha};
  }
  return cfg.grids;
}

inline std::vector<ResidualField> surface_residuals(const RunConfig& cfg, int n) {
  SurfaceGeometry g = build_surface(cfg, n);
  if (cfg.negative_control) g = scale_hc(std::move(g), 1.1);
  std::vector<ResidualField> out;
  detail::add_gmc(out, g, 1, detail::window_for(cfg, OrderWindow{}));
  return out;
}

inline ScalarField load_csv_field(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot open " + p.string());
  return read_field_csv(is);
}

/// Frames and positions of the configured surface: the analytic chart when
/// the catalog has one, otherwise integrated from the identity frame at
/// the first node.
inline std::pair<FrameField, VectorField3> surface_chart(const SurfaceGeometry& g) {
  if (has_exact_chart(g)) return {sample_frames(g), sample_positions(g)};
  FrameIntegration fi = integrate_frames(g, Frame3::Identity());
  VectorField3 r = reconstruct_positions(g, fi.frames, Vec3::Zero());
  return {std::move(fi.frames), std::move(r)};
}

inline std::vector<ResidualField> strain_residuals(const RunConfig& cfg, int n) {
  const SurfaceGeometry g = build_surface(cfg, n);
  const Grid2D& gr = g.grid();
  const auto [frames, positions] = surface_chart(g);
  const DisplacementSpec& ds = cfg.displacement;
  DisplacementField d{ScalarField(gr, 0.0), ScalarField(gr, 0.0), ScalarField(gr, 0.0)};
  if (ds.kind == "rigid") {
    d = rigid_displacement(frames, positions, RigidMotion{ds.a, ds.b});
  } else if (ds.kind == "inflation") {
    d.w = ScalarField(gr, ds.c);
  } else if (ds.kind == "csv") {
    const std::filesystem::path dir(ds.dir);
    d = {load_csv_field(dir / "u.csv"), load_csv_field(dir / "v.csv"), load_csv_field(dir / "w.csv")};
    if (!(d.u.grid() == gr)) throw ConfigError("displacement CSV grid does not match the geometry grid");
  }

  StrainState s = strains_from_displacement(g, d);
  auto [s2, tau_mismatch] = bending_strains(g, std::move(s));
  if (cfg.negative_control) {
    s2.eps1 += 0.01 * ScalarField::sample(gr, [](double a, double) { return std::sin(a); });
  }
  auto [st, pq] = pq_deformed(g, std::move(s2));

  const OrderWindow w = detail::window_for(cfg, OrderWindow::at_least(1.7));
  const double sc = strain_scale(st) * detail::geometry_scale(g);
  std::vector<ResidualField> out;
  if (ds.kind == "rigid") {
    // every strain of a rigid motion vanishes identically
    out.push_back({"strain_eps1", "strain", 1, st.eps1, w, sc});
    out.push_back({"strain_eps2", "strain", 1, st.eps2, w, sc});
    out.push_back({"strain_omega", "strain", 1, st.om, w, sc});
    out.push_back({"strain_k1", "strain", 2, st.k1, w, sc});
    out.push_back({"strain_k2", "strain", 2, st.k2, w, sc});
    out.push_back({"strain_tau", "strain", 2, st.tau, w, sc});
    out.push_back({"strain_P", "strain", 2, st.P, w, sc});
    out.push_back({"strain_Q", "strain", 2, st.Q, w, sc});
  }
  ResidualTriple t = tangential_compat_residuals(g, st);
  out.push_back({"tangential1", "tangential", 2, std::move(t.r1), w, sc});
  out.push_back({"tangential2", "tangential", 2, std::move(t.r2), w, sc});
  out.push_back({"tangential3", "tangential", 2, std::move(t.r3), w, sc});
  out.push_back({"tau_mismatch", "mismatch", 2, std::move(tau_mismatch), w, sc});
  out.push_back({"P_mismatch", "mismatch", 2, std::move(pq.P_definition_mismatch), w, sc});
  out.push_back({"Q_mismatch", "mismatch", 2, std::move(pq.Q_definition_mismatch), w, sc});
  out.push_back({"P_regrouped_mismatch", "mismatch", 2, std::move(pq.P_regrouped_mismatch), w, sc});
  out.push_back({"Q_regrouped_mismatch", "mismatch", 2, std::move(pq.Q_regrouped_mismatch), w, sc});
  auto [dL, dM] = lm_prime_difference(g, st);
  out.push_back({"lm_prime_L", "lm_prime", 2, std::move(dL), w, sc});
  out.push_back({"lm_prime_M", "lm_prime", 2, std::move(dM), w, sc});
  detail::add_goldenweizer(out, g, st, w);
  ResidualTriple nv = novozhilov_residuals(g, st);
  out.push_back({"novozhilov1", "novozhilov", 3, std::move(nv.r1), w, sc});
  out.push_back({"novozhilov2", "novozhilov", 3, std::move(nv.r2), w, sc});
  out.push_back({"novozhilov3", "novozhilov", 3, std::move(nv.r3), w, sc});
  ResidualTriple fd = compatibility_form_difference(g, st);
  out.push_back({"form_difference1", "cross_form", 3, std::move(fd.r1), w, sc});
  out.push_back({"form_difference2", "cross_form", 3, std::move(fd.r2), w, sc});
  out.push_back({"form_difference3", "cross_form", 3, std::move(fd.r3), w, sc});
  auto [c1, c2] = deformation_consistency(g, frames, positions, d);
  out.push_back({"deformation1", "deformation", 1, std::move(c1), w, sc});
  out.push_back({"deformation2", "deformation", 1, std::move(c2), w, sc});
  return out;
}

inline std::vector<ResidualField> reconstruct_residuals(const RunConfig& cfg, int n) {
  SurfaceGeometry g = build_surface(cfg, n);
  const bool chart = has_exact_chart(g);
  const Grid2D& gr = g.grid();
  if (cfg.negative_control) g = scale_hc(std::move(g), 1.1);
  const Frame3 phi0 = chart ? g.analytic->frame(gr.alpha(0), gr.beta(0)) : Frame3::Identity();
  const Vec3 r0 = chart ? g.analytic->position(gr.alpha(0), gr.beta(0)) : Vec3::Zero();
  FrameIntegration fi = integrate_frames(g, phi0);
  VectorField3 pos = reconstruct_positions(g, fi.frames, r0);

  const double sc = detail::geometry_scale(g);
  const OrderWindow w = detail::window_for(cfg, OrderWindow::at_least(1.7));
  std::vector<ResidualField> out;
  out.push_back({"closure", "frames", 0, std::move(fi.closure_res), w, sc});
  if (chart) {
    const FrameField ef = sample_frames(g);
    const VectorField3 ep = sample_positions(g);
    ScalarField fe(gr), pe(gr);
    for (std::size_t k = 0; k < gr.size(); ++k) {
      fe[k] = (fi.frames.frames[k] - ef.frames[k]).norm();
      pe[k] = (pos.vectors[k] - ep.vectors[k]).norm();
    }
    out.push_back({"frame_error", "frames", 0, std::move(fe), w, sc});
    out.push_back({"position_error", "positions", 0, std::move(pe),
                   detail::window_for(cfg, OrderWindow::at_least(2.0)), sc});
  }
  auto [w1, w2] = weingarten_residual(g, fi.frames, pos);
  out.push_back({"weingarten1", "weingarten", 1, std::move(w1), w, sc});
  out.push_back({"weingarten2", "weingarten", 1, std::move(w2), w, sc});
  return out;
}

/// Seed, symmetry and the residual families of the symmetry construction.
inline std::vector<ResidualField> symmetry_residuals(const RunConfig& cfg, int n, ResidualReport& rep) {
  const SymmetrySpec& sy = *cfg.symmetry;
  const CatalogSeed cs = seed_catalog(sy.seed, n, n);
  const Grid2D& gr = cs.seed.grid();
  const OrderWindow w = detail::window_for(cfg, OrderWindow{});
  std::vector<ResidualField> out;

  ScalarField S(gr, sy.constant);
  int extra_trim = 0;
  if (cfg.negative_control) {
    S = ScalarField(gr, 1.0);
  } else if (sy.source == "exact") {
    S = *cs.exact_symmetry;
  } else if (sy.source == "elliptic") {
    ScalarField bdy(gr, 0.0);
    if (sy.boundary == "exact") {
      bdy = *cs.exact_symmetry;
    } else {
      for (int j = 0; j < gr.n_beta; ++j) bdy(0, j) = 1.0;
      // corner discontinuities of the edge data: measure on a fixed interior window
      extra_trim = (n - 1) / 8;
    }
    const EllipticSolution sol = solve_linearized_elliptic(cs.seed, bdy);
    S = sol.symmetry.S;
    rep.notes.push_back("n=" + std::to_string(n) + ": elliptic condition estimate " +
                        std::to_string(sol.condition_estimate));
    if (sy.boundary == "exact") {
      out.push_back({"elliptic_error", "elliptic", 2, S - *cs.exact_symmetry, w, 1.0});
    }
  }

  // The second-difference stencils have absolute weights summing to 8/h^2.
  const double useed = 8.0 * std::max(1.0, cs.seed.u.max_abs());
  out.push_back({"pde", "pde", 2, pde_residual(cs.seed), w, useed, -1});
  out.push_back({"linearized", "linearized", 2, linearized_residual(cs.seed, S), w,
                 8.0 * std::max(1.0, S.max_abs()), -1 + extra_trim});
  const SymmetryStrains ss = strains_from_symmetry(cs.seed, S);
  if (ss.not_a_symmetry) {
    rep.notes.push_back("n=" + std::to_string(n) + ": S does not solve the linearized equation (interior max " +
                        std::to_string(ss.linearized_linf) + ")");
  }
  detail::add_gmc(out, ss.geometry, 2, w);
  detail::add_goldenweizer(out, ss.geometry, ss.state, w, extra_trim);
  return out;
}

inline ResidualReport run_experiment(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ResidualReport rep;
  rep.experiment = cfg.experiment;
  rep.negative_control = cfg.negative_control;
  rep.config_echo = cfg.echo;
  rep.grids = effective_grids(cfg);
  if (rep.grids.size() < 2) rep.notes.push_back("single grid: orders not reported");

  detail::StudyCollector col(cfg, rep);
  const std::string& e = cfg.experiment;
  const bool strain = e == "strain-check" || (e == "convergence" && cfg.displacement.kind != "none");
  for (int n : rep.grids) {
    std::vector<ResidualField> fields;
    auto append = [&](std::vector<ResidualField> more) {
      for (auto& f : more) fields.push_back(std::move(f));
    };
    if (e == "surface-check" || e == "convergence") append(surface_residuals(cfg, n));
    if (e == "reconstruct" || e == "convergence") append(reconstruct_residuals(cfg, n));
    if (strain) append(strain_residuals(cfg, n));
    if (e == "symmetry-demo") append(symmetry_residuals(cfg, n, rep));
    for (auto& f : fields) col.add(n, std::move(f));
  }
  col.finish();

  rep.pass = !rep.studies.empty();
  for (const auto& st : rep.studies) rep.pass = rep.pass && st.pass;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline ResidualReport run_surface_check(RunConfig cfg) {
  cfg.experiment = "surface-check";
  return run_experiment(cfg);
}
inline ResidualReport run_strain_check(RunConfig cfg) {
  cfg.experiment = "strain-check";
  return run_experiment(cfg);
}
inline ResidualReport run_symmetry_demo(RunConfig cfg) {
  cfg.experiment = "symmetry-demo";
  return run_experiment(cfg);
}
inline ResidualReport run_reconstruct(RunConfig cfg) {
  cfg.experiment = "reconstruct";
  return run_experiment(cfg);
}
inline ResidualReport run_convergence(RunConfig cfg) {
  cfg.experiment = "convergence";
  return run_experiment(cfg);
}

}  // namespace shellcompat::cli
