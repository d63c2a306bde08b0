#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bisys/config.hpp"

namespace bisys {

struct GateResult {
  std::string name;
  double measured;
  double threshold;
  bool passed;
};

struct RunReport {
  std::vector<GateResult> gates;
  std::vector<std::string> artifacts;  // file names relative to out_dir
  std::string summary_json;            // serialized summary.json content
  std::string error;                   // model error recorded mid-run, if any
  bool all_passed = true;
};

// Executes the configured mode, writes CSV artifacts and summary.json into
// out_dir (created if needed), and returns the gate results. Output depends
// only on the config contents, so repeated runs are byte-identical.
RunReport run(const RunConfig& cfg, const std::filesystem::path& out_dir,
              bool verbose = false, std::ostream* log = nullptr);

}  // namespace bisys
