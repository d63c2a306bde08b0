#include <CLI11.hpp>

#include <iostream>

#include "bisys/config.hpp"
#include "bisys/run.hpp"

// Exit codes: 0 all gates passed, 1 gate failure, 2 usage/config error,
// 3 model error during the run.
int main(int argc, char** argv) {
  CLI::App app{"two-body bound states in individual coordinates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  bool verbose = false;

  const std::vector<std::pair<std::string, std::string>> modes = {
      {"classical", "integrate the relative and individual trajectories"},
      {"schrodinger", "solve the relative and individual bound levels"},
      {"correlate", "spreads, momentum transform and small-r exponents"},
      {"dirac", "relativistic spectra and level differences"},
      {"full-report", "all of the above from one config"},
  };
  for (const auto& [name, desc] : modes) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "config file (INI-style)")
        ->required();
    sub->add_option("--out", out_dir, "output directory (default: out)");
    sub->add_flag("--verbose", verbose, "print every gate result");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string mode_name = app.get_subcommands().front()->get_name();
  try {
    const auto mode = bisys::parse_mode(mode_name);
    const auto doc = bisys::parse_config_file(config_path);
    const auto cfg = bisys::build_run_config(mode, doc);
    const auto report = bisys::run(cfg, out_dir, verbose, &std::cout);
    if (!report.error.empty()) {
      std::cerr << "error: " << report.error << "\n";
      return 3;
    }
    return report.all_passed ? 0 : 1;
  } catch (const bisys::ConfigError& e) {
    std::cerr << "config error (" << config_path << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
