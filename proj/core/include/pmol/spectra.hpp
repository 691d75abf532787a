#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmol/dynamics.hpp"

namespace pmol {

struct WelchConfig {
  int segment_length = 0;  // samples; 0 picks the largest power of two <= N/8
  double overlap = 0.5;    // fraction of a segment
  enum class Window { Hann, Boxcar } window = Window::Hann;
};

struct EstimatorInfo {
  std::string window;
  int segment_length = 0;
  double overlap = 0.0;
  int segment_count = 0;
  double sample_rate = 0.0;   // Hz
  double enbw_bins = 0.0;     // equivalent noise bandwidth of the window
  double parseval_ratio = 0.0;  // integral of the PSD / mean square of input
};

/// One-sided power spectral density (density scaling).
struct PSD {
  std::vector<double> freqs;   // Hz, uniform from 0
  std::vector<double> values;  // signal-units^2 / Hz
  double resolution_bw = 0.0;  // Hz
  EstimatorInfo estimator;

  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

struct LorentzianFit {
  double center = 0.0;      // Hz
  double fwhm = 0.0;        // Hz
  double height = 0.0;      // units^2/Hz above background
  double background = 0.0;  // units^2/Hz
  double rms_residual = 0.0;
};

/// Transmitted power past the taper, W:
/// |s_in - sqrt(gamma_ext) (cos t a+ + sin t a-)|^2 * hbar omega_L.
/// The supermode beat at Delta_omega and its mechanical sidebands appear in
/// this series because stored optics are laser-frame amplitudes.
std::vector<double> rf_photocurrent(const Trajectory& traj, const PhotonicMolecule& molecule,
                                    const PumpConfig& pump);

/// Averaged modified periodogram (Welch). Complex input is folded onto the
/// non-negative frequency axis so Parseval holds one-sided.
PSD welch_psd(std::span<const double> series, double sample_rate, const WelchConfig& cfg = {});
PSD welch_psd(std::span<const cplx> series, double sample_rate, const WelchConfig& cfg = {});

/// Nonlinear least squares of height/(1+((f-center)/(fwhm/2))^2)+background
/// over a frequency window of the PSD.
LorentzianFit lorentzian_fit(const PSD& psd, std::pair<double, double> window);

}  // namespace pmol
