#pragma once

#include <utility>
#include <vector>

#include "pmol/constants.hpp"
#include "pmol/device.hpp"

namespace pmol {

/// Hybridized eigenmodes of the coupled two-mode system.
///
/// Conventions: for bare detuning delta = (omega_1 - omega_2)/2 the branches
/// are omega_pm = (omega_1 + omega_2)/2 +- hypot(delta, kappa) and the mixing
/// angle theta = atan2(kappa, delta)/2 lies in [0, pi/2], reaching pi/4 at
/// degeneracy. Eigenvectors are (cos t, sin t) and (sin t, -cos t) in the
/// (mode1, mode2) basis, so mode 1 projects onto the branches with weights
/// cos t and sin t.
struct Supermodes {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double splitting = 0.0;     // Delta_omega = omega_plus - omega_minus
  double mixing_angle = 0.0;  // rad
  double gamma_plus = 0.0;    // eigenvector-weighted decay rates; reported,
  double gamma_minus = 0.0;   // not used in the gain law
  double gamma_bar = 0.0;     // (gamma_1 + gamma_2)/2, the dephasing rate
};

/// The two bare optical modes, their coupling, and the derived supermodes.
/// mode1 is the taper-coupled resonator.
struct PhotonicMolecule {
  OpticalMode mode1;
  OpticalMode mode2;
  double kappa = 0.0;  // inter-resonator coupling, rad/s

  Supermodes eigenmodes() const;
  double omega_bare() const { return 0.5 * (mode1.omega + mode2.omega); }
  void validate() const;
};

struct GainResult {
  double gain = 0.0;               // G, 1/s
  double effective_damping = 0.0;  // Gamma - G, 1/s
  double inversion = 0.0;          // Delta N echoed back
  double rabi_rate = 0.0;          // Omega_R = g * x_0, rad/s
};

struct Inversion {
  double delta_n = 0.0;
  bool far_detuned = false;  // laser more than 10 gamma_bar from the branch
};

struct CouplingCalibration {
  CouplingModel model;
  double rms_log_residual = 0.0;  // residual RMS of the ln(splitting) fit
};

/// x_0 = sqrt(hbar / (2 m_eff Omega_0)), m.
double zero_point_amplitude(const MechanicalMode& mech);

/// g = omega_0 / R, rad/(s m).
double optomech_coupling(double omega_0, double radius);

/// Omega_R = g(omega_bare, R) * x_0 for a mechanical mode hosted by the
/// given molecule.
double rabi_rate(const PhotonicMolecule& molecule, const MechanicalMode& mech);

/// kappa(gap) from the exponential gap law. Negative gaps are rejected.
double coupling_from_gap(double gap, const CouplingModel& model);

/// Least-squares fit of ln(splitting) against gap over (gap, splitting)
/// samples. Returns kappa_0 = splitting(0)/2 and decay_length = -1/slope.
CouplingCalibration calibrate_coupling(const std::vector<std::pair<double, double>>& samples);

Supermodes supermodes(const OpticalMode& mode1, const OpticalMode& mode2, double kappa);

/// Steady-state driven-branch photon number under the unit-efficiency
/// resonant map N = P / (hbar omega_+ gamma_bar), with the Lorentzian
/// intracavity buildup when the laser is detuned from the driven branch.
/// Blue pumping gives +N, red pumping -N.
Inversion inversion_from_pump(const PumpConfig& pump, const Supermodes& sm);

/// Mechanical gain G = (Omega_R/2)^2 dN gamma / ((dOmega - Omega_0)^2 + (gamma/2)^2).
GainResult mechanical_gain(double delta_n, const Supermodes& sm, const MechanicalMode& mech,
                           double rabi);

/// P_cT = Gamma gamma^2 hbar omega_+ / Omega_R^2, doubled when pumping at the
/// half-maximum point of the driven supermode resonance.
double threshold_power(const Supermodes& sm, const MechanicalMode& mech, double rabi,
                       bool at_fwhm);

/// Predicted cooled-to-ambient phonon number ratio Gamma / (Gamma + |G|)
/// for red-branch pumping (negative inversion). Weak-coupling rate balance.
double cooling_factor(double delta_n_negative, const Supermodes& sm, const MechanicalMode& mech,
                      double rabi);

}  // namespace pmol
