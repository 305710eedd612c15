// Command-line front end: runs a configured experiment and writes a report.
// Exit status: 0 when every check passes, 1 when any check fails or the
// numerics break down, 2 on configuration errors.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "shellcompat/cli/config.hpp"
#include "shellcompat/cli/experiments.hpp"
#include "shellcompat/cli/report.hpp"

namespace sc = shellcompat::cli;

int main(int argc, char** argv) {
  CLI::App app{"Thin-shell compatibility residual checks"};
  std::string config_path, out_dir, format, grids;
  bool negative_control = false;
  app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "both"}));
  app.add_option("--grids", grids, "Comma-separated grid sizes, e.g. 33,65,129");
  app.add_flag("--negative-control", negative_control, "Inject the experiment's known defect");
  app.set_version_flag("--version", sc::kToolVersion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  sc::RunConfig cfg;
  try {
    cfg = sc::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (!grids.empty()) cfg.grids = sc::parse_grid_list(grids);
    if (negative_control) cfg.negative_control = true;
    cfg.validate();
  } catch (const sc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  sc::ResidualReport rep;
  try {
    rep = sc::run_experiment(cfg);
  } catch (const sc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  }

  try {
    sc::write_report(rep, cfg.out_dir, cfg.format);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return 1;
  }
  sc::print_summary(std::cout, rep);
  return rep.pass ? 0 : 1;
}
