#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "pmol/errors.hpp"
#include "pmol/spectra.hpp"

namespace pmol {

namespace {

// FFTW plan creation is not thread safe; execution of a private plan is.
std::mutex g_fftw_mutex;

int auto_segment_length(size_t n) {
  int len = 1;
  while (len * 2 <= int(n / 8)) len *= 2;
  return std::max(len, 8);
}

}  // namespace

PSD welch_psd(std::span<const cplx> series, double sample_rate, const WelchConfig& cfg) {
  const size_t n = series.size();
  if (!(sample_rate > 0.0)) throw validation_error("welch_psd: sample_rate must be > 0");
  if (n < 32) throw validation_error("welch_psd: series too short");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0))
    throw validation_error("welch_psd: overlap must be in [0,1)");

  const int L = cfg.segment_length > 0 ? cfg.segment_length : auto_segment_length(n);
  if (L < 8 || size_t(L) > n) throw validation_error("welch_psd: bad segment_length");
  const int hop = std::max(1, int(std::lround(L * (1.0 - cfg.overlap))));
  const int segments = n >= size_t(L) ? int((n - L) / hop) + 1 : 0;
  if (segments < 4)
    throw validation_error(
        "welch_psd: series shorter than 4 segments; use a longer duration or a shorter "
        "segment_length");

  // Constant detrend.
  cplx mean{};
  for (const cplx& v : series) mean += v;
  mean /= double(n);
  double mean_square = 0.0;
  for (const cplx& v : series) mean_square += std::norm(v - mean);
  mean_square /= double(n);

  std::vector<double> w(L);
  if (cfg.window == WelchConfig::Window::Hann) {
    for (int i = 0; i < L; ++i)
      w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / L));
  } else {
    std::fill(w.begin(), w.end(), 1.0);
  }
  double wsum = 0.0, w2sum = 0.0;
  for (double v : w) {
    wsum += v;
    w2sum += v * v;
  }

  std::vector<double> two_sided(L, 0.0);
  {
    fftw_complex* in = fftw_alloc_complex(L);
    fftw_complex* out = fftw_alloc_complex(L);
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(g_fftw_mutex);
      plan = fftw_plan_dft_1d(L, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (int s = 0; s < segments; ++s) {
      const size_t off = size_t(s) * hop;
      for (int i = 0; i < L; ++i) {
        const cplx v = (series[off + i] - mean) * w[i];
        in[i][0] = v.real();
        in[i][1] = v.imag();
      }
      fftw_execute(plan);
      for (int i = 0; i < L; ++i)
        two_sided[i] += out[i][0] * out[i][0] + out[i][1] * out[i][1];
    }
    {
      std::lock_guard<std::mutex> lock(g_fftw_mutex);
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
  const double scale = 1.0 / (sample_rate * w2sum * segments);
  for (double& v : two_sided) v *= scale;

  // Fold onto the non-negative axis. Bin k>L/2 holds frequency (k-L)*fs/L.
  const int half = L / 2;
  PSD psd;
  psd.freqs.resize(half + 1);
  psd.values.resize(half + 1);
  const double df = sample_rate / L;
  for (int j = 0; j <= half; ++j) {
    psd.freqs[j] = j * df;
    double v = two_sided[j];
    if (j > 0 && j < half) v += two_sided[L - j];
    if (j == half && L % 2 == 1) v += two_sided[L - j];
    psd.values[j] = v;
  }

  const double enbw_bins = L * w2sum / (wsum * wsum);
  psd.resolution_bw = enbw_bins * df;

  double integral = 0.0;
  for (double v : psd.values) integral += v;
  integral *= df;

  psd.estimator.window = cfg.window == WelchConfig::Window::Hann ? "hann" : "boxcar";
  psd.estimator.segment_length = L;
  psd.estimator.overlap = cfg.overlap;
  psd.estimator.segment_count = segments;
  psd.estimator.sample_rate = sample_rate;
  psd.estimator.enbw_bins = enbw_bins;
  psd.estimator.parseval_ratio = mean_square > 0.0 ? integral / mean_square : 1.0;
  return psd;
}

PSD welch_psd(std::span<const double> series, double sample_rate, const WelchConfig& cfg) {
  std::vector<cplx> z(series.begin(), series.end());
  return welch_psd(std::span<const cplx>(z), sample_rate, cfg);
}

}  // namespace pmol
