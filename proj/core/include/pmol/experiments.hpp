#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pmol/dynamics.hpp"
#include "pmol/spectra.hpp"

namespace pmol {

/// Full device bundle: bare optical modes (mode1 carries the taper), the gap
/// law, the active coupling and the primary mechanical mode.
struct Device {
  OpticalMode mode1;
  OpticalMode mode2;
  CouplingModel coupling;
  double kappa = 0.0;
  MechanicalMode mech;

  PhotonicMolecule molecule() const { return {mode1, mode2, kappa}; }
  double rabi() const { return rabi_rate(molecule(), mech); }
  void set_splitting(double delta_omega) { kappa = 0.5 * delta_omega; }
  bool operator==(const Device&) const = default;
};

/// The device used throughout the experiment fixtures: 1550 nm, loaded
/// Q = 2e7 on both modes, half the mode-1 linewidth from the taper,
/// 40 MHz / Q_mech = 1e3 / 5e-11 kg crown mode on a 31.5 um toroid.
Device make_paper_device();

struct SweepPoint {
  double axis_value = 0.0;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, std::string>> artifacts;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;
  std::vector<std::pair<std::string, double>> summary;
  uint64_t master_seed = 0;

  double scalar(size_t point, const std::string& key) const;
  double summary_value(const std::string& key) const;
};

struct ThresholdFit {
  double threshold_power = 0.0;  // W
  double below_slope = 0.0;      // log-log
  double above_slope = 0.0;
  double knee_residual = 0.0;
};

/// Common stochastic-run knobs. Zeros mean per-sweep defaults.
struct StochasticOptions {
  double duration = 0.0;        // s
  double dt = 0.0;              // s; 0 = 0.9 * max admissible step
  double target_fs = 0.0;       // Hz; decimation picked to approach this
  double temperature = 300.0;   // K
  double discard_fraction = 0.5;
  uint64_t master_seed = 1;
  int jobs = 1;
  int segment_length = 0;       // Welch; 0 = auto
  std::string out_dir;          // per-point artifacts when non-empty
};

SweepResult splitting_sweep(const std::vector<double>& gaps, const Device& dev);

SweepResult avoided_crossing_sweep(const std::vector<double>& detunings, double kappa,
                                   const Device& dev);

struct GainTuneOptions {
  StochasticOptions stoch;
  double pump_power = 0.0;                  // W, below every mode's threshold
  std::vector<MechanicalMode> background;   // broad comb forming the noise floor
};

/// Stochastic run per splitting with all mechanical modes sharing the optical
/// field; reports the amplified-bump center and per-mode line contrasts.
SweepResult gain_tuning_sweep(const std::vector<double>& splittings,
                              const std::vector<MechanicalMode>& sharp_modes, const Device& dev,
                              const GainTuneOptions& opt);

struct ThresholdScanOptions {
  StochasticOptions stoch;
  bool pump_at_fwhm = true;  // drive at the driven supermode's half-maximum point
};

struct ThresholdScan {
  SweepResult sweep;
  ThresholdFit fit;
};

/// RF line power at the mechanical sideband versus pump power, with a
/// two-segment log-log knee fit. Splitting is pinned to Omega_0.
ThresholdScan threshold_scan(const std::vector<double>& powers, const Device& dev,
                             const ThresholdScanOptions& opt);

struct CoolingScanOptions {
  StochasticOptions stoch;
};

/// Red-branch pumping at linecenter: steady phonon number and fitted
/// mechanical linewidth against the rate-balance predictions.
SweepResult cooling_scan(const std::vector<double>& powers, const Device& dev,
                         const CoolingScanOptions& opt);

/// Emit result.csv (tidy long format) and manifest.json into dir.
void write_sweep(const std::filesystem::path& dir, const SweepResult& result,
                 const std::string& experiment_name,
                 const std::vector<std::pair<std::string, std::string>>& config_echo);

}  // namespace pmol
