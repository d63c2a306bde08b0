#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bisys/dirac.hpp"
#include "bisys/errors.hpp"
#include "bisys/potential.hpp"
#include "bisys/two_body_system.hpp"

namespace bisys {

enum class RunMode { Classical, Schrodinger, Correlate, Dirac, FullReport };

std::string to_string(RunMode mode);
RunMode parse_mode(const std::string& name);

// Raw INI-style document: [section] headers, key = value lines, # or ;
// comments. Keys keep the 1-based line where they were defined.
struct ConfigDoc {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;
};

ConfigDoc parse_config_text(const std::string& text);
ConfigDoc parse_config_file(const std::filesystem::path& path);

struct ClassicalConfig {
  std::optional<double> r0;                       // circular orbit setup
  std::optional<Eigen::Vector3d> position;        // or explicit initial state
  std::optional<Eigen::Vector3d> velocity;
  double periods = 10.0;
  int steps_per_period = 10000;
  std::optional<double> t_end;
  std::optional<double> dt;
  Eigen::Index sample_stride = 10;
};

struct SchrodingerConfig {
  std::vector<std::pair<int, int>> levels;        // (n, l)
  Eigen::Index n_points = 20000;
  std::optional<double> r_max;
};

struct CorrelateConfig {
  std::vector<double> sigmas;
  std::pair<int, int> level{1, 0};
  Eigen::Index n_points = 8000;
  Eigen::Index k_points = 1200;
  std::optional<double> k_max;
};

struct DiracRunConfig {
  double coupling = 0.0;
  std::vector<DiracLevel> levels;
  double ladder_base = 0.02;
};

// Gate thresholds; every entry can be overridden from [tolerances].
struct Tolerances {
  double collinearity = 1e-6;
  double energy_split = 1e-6;
  double angmom_split = 1e-6;
  double momentum_opposition = 1e-6;
  double energy_drift = 1e-6;
  double energy_ratio = 1e-5;
  double similarity = 1e-4;
  double closed_form = 1e-6;
  double virial = 1e-4;
  double spread_product = 1e-12;
  double parseval = 1e-6;
  double reconstruction = 5e-4;
  double exponent = 0.05;
  double bohr_limit = 1e-4;
  double quartic_scaling = 0.01;
  double quadratic_cancellation = 1e-12;
};

struct RunConfig {
  RunMode mode = RunMode::FullReport;
  TwoBodySystem system;
  CentralPotential potential = CentralPotential::coulomb(1.0);
  std::optional<ClassicalConfig> classical;
  std::optional<SchrodingerConfig> schrodinger;
  std::optional<CorrelateConfig> correlate;
  std::optional<DiracRunConfig> dirac;
  Tolerances tolerances;
};

// Validates the whole document against the known grammar (unknown sections or
// keys are rejected with their line) and materializes the sections needed by
// the mode.
RunConfig build_run_config(RunMode mode, const ConfigDoc& doc);

}  // namespace bisys
