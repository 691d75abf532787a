#include "pmol/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pmol/fit.hpp"

namespace pmol {

Supermodes PhotonicMolecule::eigenmodes() const { return supermodes(mode1, mode2, kappa); }

void PhotonicMolecule::validate() const {
  mode1.validate();
  mode2.validate();
  if (kappa < 0.0) throw validation_error("PhotonicMolecule.kappa must be >= 0");
}

double zero_point_amplitude(const MechanicalMode& mech) {
  mech.validate();
  return std::sqrt(codata.hbar / (2.0 * mech.m_eff * mech.omega_m));
}

double optomech_coupling(double omega_0, double radius) {
  if (!(omega_0 > 0.0)) throw validation_error("optomech_coupling: omega_0 must be > 0");
  if (!(radius > 0.0)) throw validation_error("optomech_coupling: radius must be > 0");
  return omega_0 / radius;
}

double rabi_rate(const PhotonicMolecule& molecule, const MechanicalMode& mech) {
  return optomech_coupling(molecule.omega_bare(), mech.radius_host) * zero_point_amplitude(mech);
}

double coupling_from_gap(double gap, const CouplingModel& model) {
  model.validate();
  if (gap < 0.0) throw validation_error("coupling_from_gap: gap must be >= 0");
  return model.kappa_0 * std::exp(-gap / model.decay_length);
}

CouplingCalibration calibrate_coupling(const std::vector<std::pair<double, double>>& samples) {
  std::set<double> gaps;
  std::vector<double> x, y;
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const auto& [gap, splitting] : samples) {
    if (!(splitting > 0.0))
      throw validation_error("calibrate_coupling: splittings must be > 0");
    gaps.insert(gap);
    x.push_back(gap);
    y.push_back(std::log(splitting));
  }
  if (gaps.size() < 2)
    throw validation_error("calibrate_coupling: need at least 2 samples with distinct gaps");

  const LineFit fit = fit_line(x, y);
  if (!(fit.slope < 0.0))
    throw compute_error("calibrate_coupling: fitted splitting does not decay with gap");

  CouplingCalibration cal;
  cal.model.kappa_0 = 0.5 * std::exp(fit.intercept);  // splitting = 2 kappa
  cal.model.decay_length = -1.0 / fit.slope;
  cal.rms_log_residual = fit.rms_residual;
  return cal;
}

Supermodes supermodes(const OpticalMode& mode1, const OpticalMode& mode2, double kappa) {
  mode1.validate();
  mode2.validate();
  if (kappa < 0.0) throw validation_error("supermodes: kappa must be >= 0");

  const double mean = 0.5 * (mode1.omega + mode2.omega);
  const double delta = 0.5 * (mode1.omega - mode2.omega);
  const double half_split = std::hypot(delta, kappa);
  const double theta = 0.5 * std::atan2(kappa, delta);
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = 1.0 - c2;
  const double g1 = mode1.gamma_loaded();
  const double g2 = mode2.gamma_loaded();

  Supermodes sm;
  sm.omega_plus = mean + half_split;
  sm.omega_minus = mean - half_split;
  sm.splitting = 2.0 * half_split;
  sm.mixing_angle = theta;
  sm.gamma_plus = g1 * c2 + g2 * s2;
  sm.gamma_minus = g1 * s2 + g2 * c2;
  sm.gamma_bar = 0.5 * (g1 + g2);
  return sm;
}

Inversion inversion_from_pump(const PumpConfig& pump, const Supermodes& sm) {
  pump.validate();
  const double gamma = sm.gamma_bar;
  if (!(gamma > 0.0)) throw validation_error("inversion_from_pump: gamma_bar must be > 0");

  Inversion out;
  if (pump.power_in == 0.0) return out;

  const double omega_branch = pump.branch == Branch::Blue ? sm.omega_plus : sm.omega_minus;
  const double detuning = pump.omega_laser - omega_branch;
  out.far_detuned = std::abs(detuning) > 10.0 * gamma;

  // Unit-efficiency map: gamma/4 in the numerator makes the resonant photon
  // number P / (hbar omega_L gamma), which reproduces the threshold formula
  // when G is set equal to Gamma.
  const double flux = pump.power_in / (codata.hbar * pump.omega_laser);
  const double n = flux * (gamma / 4.0) / (detuning * detuning + 0.25 * gamma * gamma);
  out.delta_n = pump.branch == Branch::Blue ? n : -n;
  return out;
}

GainResult mechanical_gain(double delta_n, const Supermodes& sm, const MechanicalMode& mech,
                           double rabi) {
  mech.validate();
  if (!(sm.gamma_bar > 0.0)) throw validation_error("mechanical_gain: gamma_bar must be > 0");

  const double gamma = sm.gamma_bar;
  const double det = sm.splitting - mech.omega_m;
  const double g = 0.25 * rabi * rabi * delta_n * gamma / (det * det + 0.25 * gamma * gamma);

  GainResult out;
  out.gain = g;
  out.effective_damping = mech.gamma_m - g;
  out.inversion = delta_n;
  out.rabi_rate = rabi;
  return out;
}

double threshold_power(const Supermodes& sm, const MechanicalMode& mech, double rabi,
                       bool at_fwhm) {
  mech.validate();
  if (!(rabi > 0.0)) throw validation_error("threshold_power: rabi must be > 0");
  const double gamma = sm.gamma_bar;
  double p = mech.gamma_m * gamma * gamma * codata.hbar * sm.omega_plus / (rabi * rabi);
  if (at_fwhm) p *= 2.0;
  return p;
}

double cooling_factor(double delta_n_negative, const Supermodes& sm, const MechanicalMode& mech,
                      double rabi) {
  if (delta_n_negative > 0.0)
    throw validation_error("cooling_factor: positive inversion belongs to the gain branch");
  const GainResult g = mechanical_gain(delta_n_negative, sm, mech, rabi);
  return mech.gamma_m / (mech.gamma_m + std::abs(g.gain));
}

}  // namespace pmol
