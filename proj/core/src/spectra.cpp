#include "pmol/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmol/fit.hpp"

namespace pmol {

std::vector<double> rf_photocurrent(const Trajectory& traj, const PhotonicMolecule& molecule,
                                    const PumpConfig& pump) {
  pump.validate();
  const Supermodes sm = molecule.eigenmodes();
  const double s_in =
      pump.power_in > 0.0 ? std::sqrt(pump.power_in / (codata.hbar * pump.omega_laser)) : 0.0;
  const double wp = std::cos(sm.mixing_angle);
  const double wm = std::sin(sm.mixing_angle);
  const double root_gext = std::sqrt(molecule.mode1.gamma_ext);
  const double photon_energy = codata.hbar * pump.omega_laser;

  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const State& s : traj.states) {
    const cplx field = s_in - root_gext * (wp * s.a_plus + wm * s.a_minus);
    out.push_back(photon_energy * std::norm(field));
  }
  return out;
}

LorentzianFit lorentzian_fit(const PSD& psd, std::pair<double, double> window) {
  if (!(window.first < window.second))
    throw validation_error("lorentzian_fit: empty frequency window");

  std::vector<double> f, v;
  for (size_t i = 0; i < psd.freqs.size(); ++i) {
    if (psd.freqs[i] < window.first || psd.freqs[i] > window.second) continue;
    f.push_back(psd.freqs[i]);
    v.push_back(psd.values[i]);
  }
  const int n = int(f.size());
  if (n < 8) throw validation_error("lorentzian_fit: window contains fewer than 8 bins");

  std::vector<double> sorted = v;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median_bg = sorted[n / 2];

  int peak = 0;
  for (int i = 1; i < n; ++i)
    if (v[i] > v[peak]) peak = i;
  if (!(v[peak] > 3.0 * median_bg))
    throw compute_error("lorentzian_fit: no peak above 3x the median background in window");

  // Initial width from half-power crossings around the peak.
  const double half_level = median_bg + 0.5 * (v[peak] - median_bg);
  int lo = peak, hi = peak;
  while (lo > 0 && v[lo] > half_level) --lo;
  while (hi < n - 1 && v[hi] > half_level) ++hi;
  const double df = psd.bin_width();
  double w0 = f[hi] - f[lo];
  if (!(w0 > 0.0)) w0 = 3.0 * df;

  std::vector<double> p0 = {f[peak], w0, v[peak] - median_bg, median_bg};
  const double value_scale = std::max(v[peak], 1e-300);

  LmEval eval = [&](std::span<const double> p, std::span<double> resid, double* jac) {
    const double c = p[0], w = p[1], h = p[2], bg = p[3];
    for (int i = 0; i < n; ++i) {
      const double u = (f[i] - c) / (0.5 * w);
      const double den = 1.0 + u * u;
      resid[i] = (h / den + bg - v[i]) / value_scale;
      if (jac) {
        double* row = jac + size_t(i) * 4;
        row[0] = (h * 4.0 * u / (w * den * den)) / value_scale;
        row[1] = (h * 2.0 * u * u / (w * den * den)) / value_scale;
        row[2] = (1.0 / den) / value_scale;
        row[3] = 1.0 / value_scale;
      }
    }
  };

  const LmResult res = levenberg_marquardt(eval, p0, n);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "lorentzian_fit: no convergence after " << res.iterations
        << " iterations; last iterate center=" << res.params[0] << " fwhm=" << res.params[1]
        << " height=" << res.params[2] << " background=" << res.params[3]
        << " rms=" << res.rms_residual;
    throw compute_error(msg.str());
  }

  LorentzianFit fit;
  fit.center = res.params[0];
  fit.fwhm = std::abs(res.params[1]);
  fit.height = res.params[2];
  fit.background = res.params[3];
  fit.rms_residual = res.rms_residual * value_scale;
  if (!(fit.fwhm > 0.0) || !(fit.height > 0.0))
    throw compute_error("lorentzian_fit: converged to a non-physical peak");
  return fit;
}

}  // namespace pmol
