#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmol/experiments.hpp"

namespace pmol::cli {

struct ExperimentConfig {
  std::string name;
  // threshold / cooling axes
  double power_min = 0.0, power_max = 0.0;  // W
  int points = 0;
  bool include_zero = false;
  // splitting axis
  double gap_min = 0.0, gap_max = 0.0;  // m
  // crossing axis
  double detune_span = 0.0;  // rad/s, symmetric around zero
  // gain-tune
  std::vector<double> splittings;  // rad/s
  double bg_from = 0.0, bg_to = 0.0, bg_spacing = 0.0, bg_linewidth = 0.0;  // rad/s

  bool operator==(const ExperimentConfig&) const = default;
};

struct RunConfig {
  Device device;
  // pump
  double pump_power = 0.0;      // W
  Branch branch = Branch::Blue;
  double pump_detuning = 0.0;   // rad/s from the driven supermode
  bool pump_at_fwhm = false;
  // sim
  double dt = 0.0;        // 0 = auto
  double duration = 0.0;  // s
  int decimation = 0;     // 0 = auto
  bool noise = true;
  double temperature = 300.0;  // K
  std::optional<double> n_th_override;
  bool clamp = false;
  uint64_t seed = 1;

  ExperimentConfig experiment;
  std::string out_dir;

  bool operator==(const RunConfig&) const = default;
};

/// Parse config text with optional "section.key=value" overrides applied
/// before typed extraction. Unknown sections, keys or units are rejected.
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides);
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Canonical fully-resolved form; parses back to an identical RunConfig.
std::string echo_config(const RunConfig& cfg);

}  // namespace pmol::cli
