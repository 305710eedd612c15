#pragma once

// JSON and CSV output for residual reports.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "shellcompat/cli/experiments.hpp"

namespace shellcompat::cli {

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json study_to_json(const ResidualStudy& st) {
  using nlohmann::json;
  json j;
  j["name"] = st.name;
  j["family"] = st.family;
  j["depth"] = st.depth;
  json grids = json::array(), trims = json::array(), linf = json::array(), l2 = json::array(),
       floors = json::array(), orders = json::array();
  for (const auto& s : st.samples) {
    grids.push_back(s.n);
    trims.push_back(s.trim);
    linf.push_back(detail::finite_or_null(s.norms.linf));
    l2.push_back(detail::finite_or_null(s.norms.l2));
    floors.push_back(s.floor);
  }
  for (const auto& o : st.orders) orders.push_back(o ? detail::finite_or_null(*o) : json(nullptr));
  j["grids"] = grids;
  j["trim"] = trims;
  j["linf"] = linf;
  j["l2"] = l2;
  j["floor"] = floors;
  if (st.samples.size() >= 2) {
    j["orders"] = orders;
    j["observed_order"] = st.observed_order ? detail::finite_or_null(*st.observed_order) : json(nullptr);
  }
  j["expected"] = {{"min_order", st.window.min_order},
                   {"max_order", detail::finite_or_null(st.window.max_order)},
                   {"abs_floor", st.window.abs_floor}};
  j["pass"] = st.pass;
  j["verdict"] = st.verdict;
  return j;
}

inline nlohmann::json report_to_json(const ResidualReport& rep) {
  using nlohmann::json;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "shellcompat";
  j["version"] = kToolVersion;
  j["experiment"] = rep.experiment;
  j["negative_control"] = rep.negative_control;
  j["config"] = rep.config_echo;
  j["grids"] = rep.grids;
  j["notes"] = rep.notes;
  json res = json::array();
  for (const auto& st : rep.studies) res.push_back(study_to_json(st));
  j["residuals"] = res;
  j["pass"] = rep.pass;
  j["wall_time_s"] = rep.wall_time_s;
  return j;
}

/// Writes report.json and/or the per-residual CSV dumps into `dir`.
inline void write_report(const ResidualReport& rep, const std::filesystem::path& dir, const std::string& format) {
  std::filesystem::create_directories(dir);
  if (format == "json" || format == "both") {
    std::ofstream os(dir / "report.json");
    if (!os) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    os << report_to_json(rep).dump(2) << '\n';
  }
  if (format == "csv" || format == "both") {
    for (const auto& [name, field] : rep.dumps) {
      std::ofstream os(dir / (name + ".csv"));
      if (!os) throw std::runtime_error("cannot write " + name + ".csv");
      write_field_csv(os, field);
    }
  }
}

inline void print_summary(std::ostream& os, const ResidualReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %-13s %12s %8s  %s\n", "residual", "family", "finest linf", "order",
                "result");
  os << buf;
  for (const auto& st : rep.studies) {
    const double linf = st.samples.empty() ? NAN : st.samples.back().norms.linf;
    std::string order = st.observed_order ? std::to_string(*st.observed_order).substr(0, 5) : "-";
    std::snprintf(buf, sizeof buf, "%-24s %-13s %12.4e %8s  %s (%s)\n", st.name.c_str(), st.family.c_str(), linf,
                  order.c_str(), st.pass ? "PASS" : "FAIL", st.verdict.c_str());
    os << buf;
  }
  for (const auto& n : rep.notes) os << "note: " << n << '\n';
  os << (rep.pass ? "overall: PASS" : "overall: FAIL") << '\n';
}

}  // namespace shellcompat::cli
