#pragma once

// Run configuration for the command-line front end. The file format is
// flat "key = value" lines grouped under [section] headers; '#' and ';'
// start comments.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellcompat/convergence.hpp"
#include "shellcompat/integrable.hpp"
#include "shellcompat/surface.hpp"

namespace shellcompat::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using IniData = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("'" + key + "': trailing characters in '" + v + "'");
  return x;
}

inline int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != static_cast<int>(x)) throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim_ws(item));
  return out;
}

inline Vec3 to_vec3(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 3) throw ConfigError("'" + key + "': expected three comma-separated numbers");
  return {to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2])};
}

}  // namespace detail

inline IniData parse_ini(std::istream& is) {
  IniData data;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = detail::trim_ws(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
      section = detail::trim_ws(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      data[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = detail::trim_ws(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    data[section][key] = detail::trim_ws(line.substr(eq + 1));
  }
  return data;
}

struct DisplacementSpec {
  std::string kind = "none";  // none | rigid | inflation | csv
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double c = 0.0;
  std::string dir;  // csv: directory with u.csv, v.csv, w.csv
};

struct SymmetrySpec {
  SeedSpec seed;
  std::string source = "exact";    // exact | elliptic | constant
  std::string boundary = "exact";  // elliptic Dirichlet data: exact | edge
  double constant = 1.0;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"surface-check", "strain-check", "symmetry-demo", "reconstruct",
                                          "convergence"};
  return k;
}

struct RunConfig {
  std::string experiment = "surface-check";
  SurfaceSpec surface = default_surface_spec("sphere");
  std::string bundle;  // non-empty: load geometry from this CSV bundle
  std::vector<int> grids{33, 65, 129};
  std::optional<int> trim;  // unset: nesting depth of each residual
  std::optional<double> min_order, max_order;
  double abs_floor = 1e-12;
  double single_grid_tol = 1e-3;
  DisplacementSpec displacement;
  std::optional<SymmetrySpec> symmetry;
  std::string out_dir = ".";
  std::string format = "json";
  bool negative_control = false;
  IniData echo;

  void validate() const {
    bool known = false;
    for (const auto& k : experiment_kinds()) known = known || k == experiment;
    if (!known) throw ConfigError("unknown experiment kind '" + experiment + "'");
    if (grids.empty()) throw ConfigError("grid list is empty");
    for (std::size_t k = 0; k < grids.size(); ++k) {
      if (grids[k] < 9) throw ConfigError("grid sizes must be at least 9");
      if (k > 0 && grids[k] <= grids[k - 1]) throw ConfigError("grid sizes must be strictly increasing");
    }
    if (trim && *trim < 0) throw ConfigError("trim must be non-negative");
    if (min_order && !(*min_order > 0.0)) throw ConfigError("min_order must be positive");
    if (max_order && !(*max_order > 0.0)) throw ConfigError("max_order must be positive");
    if (min_order && max_order && *max_order < *min_order) throw ConfigError("max_order < min_order");
    if (!(abs_floor > 0.0)) throw ConfigError("abs_floor must be positive");
    if (!(single_grid_tol > 0.0)) throw ConfigError("single_grid_tol must be positive");
    if (format != "json" && format != "csv" && format != "both") {
      throw ConfigError("format must be json, csv or both");
    }
    const std::string& dk = displacement.kind;
    if (dk != "none" && dk != "rigid" && dk != "inflation" && dk != "csv") {
      throw ConfigError("unknown displacement kind '" + dk + "'");
    }
    if (dk == "csv" && displacement.dir.empty()) throw ConfigError("csv displacement needs 'dir'");
    if (experiment == "symmetry-demo") {
      if (!symmetry) throw ConfigError("symmetry-demo needs a [symmetry] section");
      const auto& s = *symmetry;
      if (s.source != "exact" && s.source != "elliptic" && s.source != "constant") {
        throw ConfigError("symmetry source must be exact, elliptic or constant");
      }
      if (s.boundary != "exact" && s.boundary != "edge") throw ConfigError("boundary must be exact or edge");
      if (s.source == "elliptic" && s.seed.name == "sg_kink") {
        throw ConfigError("elliptic solve is only available for minimal and cmc seeds");
      }
    }
  }
};

inline RunConfig config_from_ini(const IniData& ini) {
  using namespace detail;
  RunConfig cfg;
  cfg.echo = ini;
  static const std::map<std::string, std::vector<std::string>> allowed{
      {"experiment", {"kind", "grids", "trim", "min_order", "max_order", "abs_floor", "single_grid_tol",
                      "negative_control"}},
      {"surface", {"name", "bundle", "alpha_min", "alpha_max", "beta_min", "beta_max", "radius", "rho",
                   "mean_curvature", "first_integral", "hc_scale"}},
      {"displacement", {"kind", "a", "b", "c", "dir"}},
      {"symmetry", {"seed", "source", "boundary", "constant", "rho", "mean_curvature", "first_integral",
                    "alpha_min", "alpha_max", "beta_min", "beta_max"}},
      {"output", {"dir", "format"}}};
  for (const auto& [sec, kv] : ini) {
    const auto it = allowed.find(sec);
    if (it == allowed.end()) throw ConfigError("unknown section [" + sec + "]");
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (const auto& a : it->second) ok = ok || a == k;
      if (!ok) throw ConfigError("unknown key '" + k + "' in [" + sec + "]");
    }
  }
  auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    const auto s = ini.find(sec);
    if (s == ini.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  };
  auto num = [&](const std::string& sec, const std::string& key, double& dst) {
    if (auto v = get(sec, key)) dst = to_double(key, *v);
  };

  if (auto v = get("experiment", "kind")) cfg.experiment = *v;
  if (auto v = get("experiment", "grids")) {
    cfg.grids.clear();
    for (const auto& g : split(*v, ',')) cfg.grids.push_back(to_int("grids", g));
  }
  if (auto v = get("experiment", "trim"); v && *v != "auto") cfg.trim = to_int("trim", *v);
  if (auto v = get("experiment", "min_order")) cfg.min_order = to_double("min_order", *v);
  if (auto v = get("experiment", "max_order")) cfg.max_order = to_double("max_order", *v);
  num("experiment", "abs_floor", cfg.abs_floor);
  num("experiment", "single_grid_tol", cfg.single_grid_tol);
  if (auto v = get("experiment", "negative_control")) cfg.negative_control = to_bool("negative_control", *v);

  if (auto v = get("surface", "bundle")) cfg.bundle = *v;
  try {
    cfg.surface = default_surface_spec(get("surface", "name").value_or("sphere"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  num("surface", "alpha_min", cfg.surface.alpha_min);
  num("surface", "alpha_max", cfg.surface.alpha_max);
  num("surface", "beta_min", cfg.surface.beta_min);
  num("surface", "beta_max", cfg.surface.beta_max);
  num("surface", "radius", cfg.surface.radius);
  num("surface", "rho", cfg.surface.rho);
  num("surface", "mean_curvature", cfg.surface.mean_curvature);
  num("surface", "first_integral", cfg.surface.first_integral);
  num("surface", "hc_scale", cfg.surface.hc_scale);

  if (auto v = get("displacement", "kind")) cfg.displacement.kind = *v;
  if (auto v = get("displacement", "a")) cfg.displacement.a = to_vec3("a", *v);
  if (auto v = get("displacement", "b")) cfg.displacement.b = to_vec3("b", *v);
  num("displacement", "c", cfg.displacement.c);
  if (auto v = get("displacement", "dir")) cfg.displacement.dir = *v;

  if (ini.count("symmetry")) {
    SymmetrySpec s;
    try {
      s.seed = default_seed_spec(get("symmetry", "seed").value_or("catenoid_log_cosh"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (auto v = get("symmetry", "source")) s.source = *v;
    if (auto v = get("symmetry", "boundary")) s.boundary = *v;
    num("symmetry", "constant", s.constant);
    num("symmetry", "rho", s.seed.rho);
    num("symmetry", "mean_curvature", s.seed.mean_curvature);
    num("symmetry", "first_integral", s.seed.first_integral);
    num("symmetry", "alpha_min", s.seed.alpha_min);
    num("symmetry", "alpha_max", s.seed.alpha_max);
    num("symmetry", "beta_min", s.seed.beta_min);
    num("symmetry", "beta_max", s.seed.beta_max);
    cfg.symmetry = s;
  }

  if (auto v = get("output", "dir")) cfg.out_dir = *v;
  if (auto v = get("output", "format")) cfg.format = *v;
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return config_from_ini(parse_ini(is));
}

inline std::vector<int> parse_grid_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& g : detail::split(s, ',')) out.push_back(detail::to_int("grids", g));
  return out;
}

}  // namespace shellcompat::cli
