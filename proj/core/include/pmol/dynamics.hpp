#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pmol/device.hpp"
#include "pmol/model.hpp"

namespace pmol {

using cplx = std::complex<double>;

struct SimConfig {
  double dt = 0.0;        // s
  double duration = 0.0;  // s
  uint64_t seed = 0;      // master seed
  uint64_t run_index = 0;  // selects the per-run counter-based noise stream
  int decimation = 1;
  bool noise_enabled = false;
  bool damping_enabled = true;
  bool clamp_pump = false;     // freeze the driven amplitude at its initial value
  bool skip_dt_check = false;  // step-size convergence studies only
};

/// Mean-field amplitudes. |a_plus|^2 and |a_minus|^2 are supermode photon
/// numbers, |b_amp|^2 the phonon number.
struct State {
  cplx a_plus{};
  cplx a_minus{};
  cplx b_amp{};
};

struct NoiseModel {
  double n_th = 0.0;       // thermal phonon occupancy
  double bath_temp = 0.0;  // K
  bool optical_noise = false;

  /// Classical occupancy n_th = k_B T / (hbar Omega_0).
  static NoiseModel from_temperature(double temp_kelvin, double omega_m);
  void validate() const;
};

/// Rotating-frame bookkeeping. The integrator works in branch-local frames
/// (both optical envelopes carry the driven-branch detuning; b rotates at
/// Omega_0 - Delta_omega). Stored optics are re-phased into the common laser
/// frame so the undriven branch carries the splitting beat explicitly.
struct FrameDescriptor {
  double omega_laser = 0.0;
  double delta_omega = 0.0;    // supermode splitting
  double delta_drive = 0.0;    // driven-supermode detuning from the laser
  double mech_residual = 0.0;  // Omega_0 - delta_omega
  Branch branch = Branch::Blue;
};

/// Everything the analysis operations need to interpret a trajectory.
struct TrajectoryMeta {
  SimConfig sim;
  NoiseModel noise;
  PumpConfig pump;
  Supermodes modes;
  MechanicalMode mech;
  double rabi = 0.0;
  double gamma_ext = 0.0;  // taper rate of bare mode 1
  double mixing_angle = 0.0;
  bool drive_on = false;
};

struct Trajectory {
  std::vector<double> times;   // uniform spacing dt * decimation
  std::vector<State> states;   // optics laser frame, b in the splitting frame
  FrameDescriptor frames;
  TrajectoryMeta meta;

  double sample_rate() const {
    return times.size() > 1 ? 1.0 / (times[1] - times[0]) : 0.0;
  }
};

/// Largest admissible fixed step: 1 / (20 * max residual rate) over the
/// detunings, optical decay rates, mechanical rates and |Delta_omega - Omega_j|.
/// Returns +inf when every rate vanishes.
double max_admissible_dt(const PhotonicMolecule& molecule,
                         std::span<const MechanicalMode> mechs, const PumpConfig& pump);

/// Drift of the coupled three-wave equations in the integration frames.
State drift(const State& s, const PhotonicMolecule& molecule, const MechanicalMode& mech,
            const PumpConfig& pump, double rabi);

/// Fixed-step integration: RK4 when noise is off, stochastic Heun with an
/// additive complex Gaussian increment on b (per-step variance
/// Gamma n_th dt) when on. rabi defaults to g*x_0 derived from the device.
Trajectory integrate(const SimConfig& cfg, const PhotonicMolecule& molecule,
                     const MechanicalMode& mech, const PumpConfig& pump, const NoiseModel& noise,
                     const State& initial, std::optional<double> rabi = std::nullopt);

/// One mechanical oscillator of a multi-mode run.
struct MechOscillator {
  MechanicalMode mode;
  double rabi = 0.0;
  double n_th = 0.0;
};

/// Callback receives decimated frames: time, laser-frame optical amplitudes
/// and the branch-frame mechanical amplitudes.
using MultiModeRecord =
    std::function<void(double t, cplx a_plus, cplx a_minus, std::span<const cplx> bs)>;

/// Multi-mode variant used by the sweep runners: independent mechanical
/// oscillators sharing the optical field.
void integrate_multimode(const SimConfig& cfg, const PhotonicMolecule& molecule,
                         const PumpConfig& pump, std::span<const MechOscillator> oscillators,
                         const State& optical_initial, std::span<const cplx> b_initial,
                         const NoiseModel& optical_noise, const MultiModeRecord& record);

/// Least-squares slope of ln|b|^2 over a time window; equals G - Gamma for
/// clamped-pump linearized runs.
double small_signal_growth_rate(const Trajectory& traj, std::pair<double, double> window);

/// Max relative drift of C1 = |a+|^2 + |b|^2 and C2 = |a-|^2 - |b|^2.
/// Only valid for runs with damping, noise and drive all off.
std::pair<double, double> manley_rowe_residuals(const Trajectory& traj);

struct PhononStats {
  double mean = 0.0;
  double std_error = 0.0;
  int blocks = 0;
};

/// Tail average of |b|^2 with block-averaged standard error (>= 8 blocks).
PhononStats steady_phonon_number(const Trajectory& traj, double discard_fraction);

}  // namespace pmol
