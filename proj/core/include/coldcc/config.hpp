#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coldcc/experiments.hpp"

// Run configuration: one YAML file with diatom, surface, scattering and
// output sections. Every error names the file, line and column of the
// offending entry.

namespace coldcc::config {

enum class ModelSelection { rigid, vibrating, both };

struct AdiabatSettings {
  int jtot = 1;
  channels::Parity parity = channels::Parity::even;
  double lambda = 90.5;
  double R_from = 4.1;
  double R_to = 40.0;
  int points = 400;
};

struct ScanSettings {
  double energy_K = 1e-6;
  std::vector<double> lambdas;
  double feature_ratio = 10.0;
  /// Also bracket scattering-length poles and compare with the bound-state count.
  bool pole_search = false;
  int pole_initial_points = 100;
  double pole_min_width = 1e-13;
};

struct OutputSettings {
  std::filesystem::path directory = "coldcc-out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  experiments::ModelSetup setup;  ///< setup.mode is ignored; see `models`
  ModelSelection models = ModelSelection::both;
  std::vector<double> energies_K;
  experiments::RateOptions rates;
  bool include_v1 = true;  ///< compare: extra vibrating run with v = 1 channels
  AdiabatSettings adiabats;
  ScanSettings scan;
  OutputSettings output;

  /// Setups for the selected models, rigid first.
  std::vector<experiments::ModelSetup> model_setups() const;
};

/// Parses YAML text; `source` names the input in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Fully commented reference configuration; parsing it gives the defaults.
std::string default_config_text();

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& config);

}  // namespace coldcc::config
