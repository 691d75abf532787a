#include "pmol/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pmol/fit.hpp"
#include "pmol/io.hpp"

namespace pmol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, n);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double auto_dt(const PhotonicMolecule& mol, std::span<const MechanicalMode> mechs,
               const PumpConfig& pump, double requested) {
  if (requested > 0.0) return requested;
  const double dt_max = max_admissible_dt(mol, mechs, pump);
  if (!std::isfinite(dt_max))
    throw validation_error("cannot pick dt automatically: all rates vanish");
  return 0.9 * dt_max;
}

int decimation_for(double dt, double target_fs) {
  if (!(target_fs > 0.0)) return 1;
  return std::max(1, int(std::floor(1.0 / (dt * target_fs))));
}

/// Integrated PSD over |f - f0| <= 3 resolution bandwidths.
double line_power(const PSD& psd, double f0) {
  const double df = psd.bin_width();
  double acc = 0.0;
  for (size_t i = 0; i < psd.freqs.size(); ++i)
    if (std::abs(psd.freqs[i] - f0) <= 3.0 * psd.resolution_bw) acc += psd.values[i] * df;
  return acc;
}

/// Median PSD density in the annulus 5..15 RBW away from f0.
double local_background(const PSD& psd, double f0) {
  std::vector<double> ring;
  for (size_t i = 0; i < psd.freqs.size(); ++i) {
    const double d = std::abs(psd.freqs[i] - f0);
    if (d > 5.0 * psd.resolution_bw && d < 15.0 * psd.resolution_bw)
      ring.push_back(psd.values[i]);
  }
  if (ring.size() < 4) return 0.0;
  std::nth_element(ring.begin(), ring.begin() + ring.size() / 2, ring.end());
  return ring[ring.size() / 2];
}

std::vector<double> median_filter(const std::vector<double>& v, int half_width) {
  std::vector<double> out(v.size());
  std::vector<double> buf;
  for (size_t i = 0; i < v.size(); ++i) {
    const size_t lo = i >= size_t(half_width) ? i - half_width : 0;
    const size_t hi = std::min(v.size() - 1, i + half_width);
    buf.assign(v.begin() + lo, v.begin() + hi + 1);
    std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
    out[i] = buf[buf.size() / 2];
  }
  return out;
}

std::string point_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%03d", index);
  return buf;
}

}  // namespace

Device make_paper_device() {
  Device dev;
  const double omega0 = kTwoPi * codata.c_light / 1550e-9;
  const double gamma_loaded = omega0 / 2e7;
  dev.mode1 = {omega0, 0.5 * gamma_loaded, 0.5 * gamma_loaded};
  dev.mode2 = {omega0, gamma_loaded, 0.0};
  dev.coupling = {kTwoPi * 5e9, 120e-9};
  dev.mech = {kTwoPi * 40e6, kTwoPi * 40e6 / 1e3, 5e-11, 31.5e-6};
  dev.set_splitting(dev.mech.omega_m);
  return dev;
}

double SweepResult::scalar(size_t point, const std::string& key) const {
  for (const auto& [k, v] : points.at(point).scalars)
    if (k == key) return v;
  throw validation_error("SweepResult: no scalar '" + key + "' at point");
}

double SweepResult::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw validation_error("SweepResult: no summary value '" + key + "'");
}

SweepResult splitting_sweep(const std::vector<double>& gaps, const Device& dev) {
  if (gaps.size() < 3) throw validation_error("splitting_sweep: need >= 3 gaps");

  SweepResult res;
  res.axis = "gap_m";
  std::vector<double> lnsplit;
  for (const double gap : gaps) {
    const double kappa = coupling_from_gap(gap, dev.coupling);
    const Supermodes sm = supermodes(dev.mode1, dev.mode2, kappa);
    SweepPoint pt;
    pt.axis_value = gap;
    pt.scalars = {{"kappa_rad_s", kappa},
                  {"omega_plus_rad_s", sm.omega_plus},
                  {"omega_minus_rad_s", sm.omega_minus},
                  {"splitting_rad_s", sm.splitting},
                  {"splitting_hz", sm.splitting / kTwoPi}};
    res.points.push_back(std::move(pt));
    lnsplit.push_back(std::log(sm.splitting));
  }
  const LineFit fit = fit_line(gaps, lnsplit);
  res.summary = {{"log_fit_slope", fit.slope},
                 {"log_fit_r_squared", fit.r_squared},
                 {"fitted_decay_length_m", -1.0 / fit.slope},
                 {"fitted_kappa0_rad_s", 0.5 * std::exp(fit.intercept)}};
  return res;
}

SweepResult avoided_crossing_sweep(const std::vector<double>& detunings, double kappa,
                                   const Device& dev) {
  if (detunings.size() < 3) throw validation_error("avoided_crossing_sweep: need >= 3 detunings");
  const auto [lo, hi] = std::minmax_element(detunings.begin(), detunings.end());
  if (!(*lo <= 0.0 && *hi >= 0.0))
    throw validation_error("avoided_crossing_sweep: detunings must bracket zero");

  SweepResult res;
  res.axis = "bare_detuning_rad_s";
  double min_sep = std::numeric_limits<double>::infinity();
  double min_at = 0.0;
  for (const double delta : detunings) {
    OpticalMode m1 = dev.mode1;
    m1.omega = dev.mode2.omega + delta;
    const Supermodes sm = supermodes(m1, dev.mode2, kappa);
    SweepPoint pt;
    pt.axis_value = delta;
    pt.scalars = {{"omega_plus_rad_s", sm.omega_plus},
                  {"omega_minus_rad_s", sm.omega_minus},
                  {"separation_rad_s", sm.splitting},
                  {"mixing_angle_rad", sm.mixing_angle}};
    res.points.push_back(std::move(pt));
    if (sm.splitting < min_sep) {
      min_sep = sm.splitting;
      min_at = delta;
    }
  }
  res.summary = {{"min_separation_rad_s", min_sep},
                 {"min_separation_at_rad_s", min_at},
                 {"kappa_rad_s", kappa}};
  return res;
}

SweepResult gain_tuning_sweep(const std::vector<double>& splittings,
                              const std::vector<MechanicalMode>& sharp_modes, const Device& dev,
                              const GainTuneOptions& opt) {
  if (splittings.empty()) throw validation_error("gain_tuning_sweep: no splittings");
  if (sharp_modes.empty()) throw validation_error("gain_tuning_sweep: no mechanical modes");
  if (!(opt.pump_power > 0.0)) throw validation_error("gain_tuning_sweep: pump_power must be > 0");
  if (!(opt.stoch.duration > 0.0)) throw validation_error("gain_tuning_sweep: duration must be > 0");
  if (!(opt.stoch.temperature > 0.0))
    throw validation_error("gain_tuning_sweep: thermal noise is required (temperature > 0)");

  std::vector<MechanicalMode> all_modes = sharp_modes;
  all_modes.insert(all_modes.end(), opt.background.begin(), opt.background.end());

  // Sub-threshold precondition for every mode at every splitting.
  for (const double dw : splittings) {
    Device d = dev;
    d.set_splitting(dw);
    const Supermodes sm = d.molecule().eigenmodes();
    const PumpConfig pump{opt.pump_power, sm.omega_plus, Branch::Blue};
    const Inversion inv = inversion_from_pump(pump, sm);
    for (const auto& mode : all_modes) {
      const double rr = rabi_rate(d.molecule(), mode);
      const GainResult g = mechanical_gain(inv.delta_n, sm, mode, rr);
      if (!(g.gain < mode.gamma_m)) {
        std::ostringstream msg;
        msg << "gain_tuning_sweep: pump " << opt.pump_power << " W reaches threshold of the "
            << mode.omega_m / kTwoPi << " Hz mode at splitting " << dw / kTwoPi << " Hz";
        throw validation_error(msg.str());
      }
    }
  }

  SweepResult res;
  res.axis = "splitting_rad_s";
  res.master_seed = opt.stoch.master_seed;
  res.points.resize(splittings.size());

  parallel_for(int(splittings.size()), opt.stoch.jobs, [&](int i) {
    const double dw = splittings[i];
    Device d = dev;
    d.set_splitting(dw);
    const PhotonicMolecule mol = d.molecule();
    const Supermodes sm = mol.eigenmodes();
    const PumpConfig pump{opt.pump_power, sm.omega_plus, Branch::Blue};

    std::vector<MechOscillator> oscs;
    std::vector<cplx> b0;
    double f_max = dw;
    for (const auto& mode : all_modes) {
      MechOscillator o;
      o.mode = mode;
      o.rabi = rabi_rate(mol, mode);
      o.n_th = NoiseModel::from_temperature(opt.stoch.temperature, mode.omega_m).n_th;
      oscs.push_back(o);
      b0.push_back(std::sqrt(o.n_th));
      f_max = std::max(f_max, mode.omega_m);
    }

    SimConfig cfg;
    cfg.dt = auto_dt(mol, all_modes, pump, opt.stoch.dt);
    cfg.duration = opt.stoch.duration;
    cfg.seed = opt.stoch.master_seed;
    cfg.run_index = uint64_t(i);
    cfg.noise_enabled = true;
    const double target_fs =
        opt.stoch.target_fs > 0.0 ? opt.stoch.target_fs : 2.6 * (f_max + sm.gamma_bar) / kTwoPi;
    cfg.decimation = decimation_for(cfg.dt, target_fs);

    // Photocurrent assembled on the fly; mechanical tail averages streamed.
    const double s_in = std::sqrt(pump.power_in / (codata.hbar * pump.omega_laser));
    const double wp = std::cos(sm.mixing_angle), wm = std::sin(sm.mixing_angle);
    const double root_gext = std::sqrt(dev.mode1.gamma_ext);
    const double photon_energy = codata.hbar * pump.omega_laser;

    const long long n_steps = std::llround(cfg.duration / cfg.dt);
    const size_t n_frames = size_t(n_steps / cfg.decimation) + 1;
    const size_t tail_start = size_t(opt.stoch.discard_fraction * double(n_frames));

    std::vector<double> pc;
    pc.reserve(n_frames);
    std::vector<double> b2_sum(all_modes.size(), 0.0);
    size_t tail_count = 0;

    integrate_multimode(cfg, mol, pump, oscs, State{}, b0, NoiseModel{},
                        [&](double, cplx ap, cplx am, std::span<const cplx> bs) {
                          const cplx field = s_in - root_gext * (wp * ap + wm * am);
                          pc.push_back(photon_energy * std::norm(field));
                          if (pc.size() > tail_start) {
                            for (size_t j = 0; j < bs.size(); ++j)
                              b2_sum[j] += std::norm(bs[j]);
                            ++tail_count;
                          }
                        });

    const double fs = 1.0 / (cfg.dt * cfg.decimation);
    WelchConfig wcfg;
    wcfg.segment_length = opt.stoch.segment_length;
    const PSD psd = welch_psd(
        std::span<const double>(pc.data() + tail_start, pc.size() - tail_start), fs, wcfg);

    // Bump center from the median-filtered spectrum so single-bin mechanical
    // lines do not capture the fit.
    PSD smooth = psd;
    smooth.values = median_filter(psd.values, 2);
    const double f_center = dw / kTwoPi;
    const double half_window = 3.0 * sm.gamma_bar / kTwoPi;
    const LorentzianFit bump = lorentzian_fit(
        smooth, {std::max(psd.freqs.front(), f_center - half_window),
                 std::min(psd.freqs.back(), f_center + half_window)});

    SweepPoint pt;
    pt.axis_value = dw;
    pt.scalars = {{"bump_center_hz", bump.center},
                  {"bump_fwhm_hz", bump.fwhm},
                  {"bump_height", bump.height},
                  {"rbw_hz", psd.resolution_bw}};
    for (size_t j = 0; j < sharp_modes.size(); ++j) {
      const double f_j = sharp_modes[j].omega_m / kTwoPi;
      const double lp = line_power(psd, f_j);
      const double bg = local_background(psd, f_j);
      const double bg_power = bg * 6.0 * psd.resolution_bw;
      const std::string tag = "sharp" + std::to_string(j);
      pt.scalars.emplace_back(tag + "_freq_hz", f_j);
      pt.scalars.emplace_back(tag + "_line_power", lp);
      pt.scalars.emplace_back(tag + "_contrast", bg_power > 0.0 ? lp / bg_power : 0.0);
      pt.scalars.emplace_back(tag + "_mean_phonons",
                              tail_count > 0 ? b2_sum[j] / double(tail_count) : 0.0);
    }

    if (!opt.stoch.out_dir.empty()) {
      const std::filesystem::path dir =
          std::filesystem::path(opt.stoch.out_dir) / point_dir_name(i);
      std::filesystem::create_directories(dir);
      io::write_psd(dir / "psd.csv", psd);
      pt.artifacts.emplace_back("psd", (dir / "psd.csv").string());
    }
    res.points[i] = std::move(pt);
  });
  return res;
}

ThresholdScan threshold_scan(const std::vector<double>& powers, const Device& dev,
                             const ThresholdScanOptions& opt) {
  if (powers.size() < 8) throw validation_error("threshold_scan: need >= 8 power points");
  std::vector<double> sorted = powers;
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > 0.0)) throw validation_error("threshold_scan: powers must be > 0");
  if (sorted.back() / sorted.front() < 10.0)
    throw validation_error("threshold_scan: powers must span at least one decade");
  if (!(opt.stoch.temperature > 0.0))
    throw validation_error(
        "threshold_scan: noise is required to seed the below-threshold signal (temperature > 0)");
  if (!(opt.stoch.duration > 0.0)) throw validation_error("threshold_scan: duration must be > 0");

  Device d = dev;
  d.set_splitting(d.mech.omega_m);
  const PhotonicMolecule mol = d.molecule();
  const Supermodes sm = mol.eigenmodes();
  const double rr = d.rabi();
  const double p_analytic = threshold_power(sm, d.mech, rr, opt.pump_at_fwhm);
  if (!(sorted.front() < p_analytic && p_analytic < sorted.back()))
    throw validation_error("threshold_scan: powers must cross the analytic threshold");

  const NoiseModel noise = NoiseModel::from_temperature(opt.stoch.temperature, d.mech.omega_m);
  const double f_line = d.mech.omega_m / kTwoPi;

  SweepResult res;
  res.axis = "pump_power_w";
  res.master_seed = opt.stoch.master_seed;
  res.points.resize(sorted.size());

  parallel_for(int(sorted.size()), opt.stoch.jobs, [&](int i) {
    PumpConfig pump;
    pump.power_in = sorted[i];
    pump.branch = Branch::Blue;
    pump.omega_laser = sm.omega_plus + (opt.pump_at_fwhm ? 0.5 * sm.gamma_bar : 0.0);

    SimConfig cfg;
    cfg.dt = auto_dt(mol, std::span(&d.mech, 1), pump, opt.stoch.dt);
    cfg.duration = opt.stoch.duration;
    cfg.seed = opt.stoch.master_seed;
    cfg.run_index = uint64_t(i);
    cfg.noise_enabled = true;
    const double target_fs =
        opt.stoch.target_fs > 0.0 ? opt.stoch.target_fs : 5.2 * d.mech.omega_m / kTwoPi;
    cfg.decimation = decimation_for(cfg.dt, target_fs);

    State init;
    init.b_amp = std::sqrt(noise.n_th);
    const Trajectory traj = integrate(cfg, mol, d.mech, pump, noise, init);

    const std::vector<double> pc = rf_photocurrent(traj, mol, pump);
    const size_t tail_start = size_t(opt.stoch.discard_fraction * double(pc.size()));
    WelchConfig wcfg;
    wcfg.segment_length = opt.stoch.segment_length;
    const PSD psd = welch_psd(
        std::span<const double>(pc.data() + tail_start, pc.size() - tail_start),
        traj.sample_rate(), wcfg);
    const double lp = line_power(psd, f_line);
    const PhononStats ph = steady_phonon_number(traj, opt.stoch.discard_fraction);

    SweepPoint pt;
    pt.axis_value = sorted[i];
    pt.scalars = {{"rf_line_power", lp},
                  {"phonon_number", ph.mean},
                  {"phonon_std_error", ph.std_error},
                  {"rbw_hz", psd.resolution_bw}};
    if (!opt.stoch.out_dir.empty()) {
      const std::filesystem::path dir =
          std::filesystem::path(opt.stoch.out_dir) / point_dir_name(i);
      std::filesystem::create_directories(dir);
      io::write_psd(dir / "psd.csv", psd);
      pt.artifacts.emplace_back("psd", (dir / "psd.csv").string());
    }
    res.points[i] = std::move(pt);
  });

  std::vector<double> lx, ly;
  for (const auto& pt : res.points) {
    const double lp = pt.scalars.front().second;
    if (!(lp > 0.0)) throw compute_error("threshold_scan: zero RF line power in scan");
    lx.push_back(std::log10(pt.axis_value));
    ly.push_back(std::log10(lp));
  }
  const PiecewiseFit pw = fit_piecewise_linear(lx, ly);
  const double span = lx.back() - lx.front();
  const bool interior = pw.break_x > lx.front() + 0.02 * span &&
                        pw.break_x < lx.back() - 0.02 * span;
  if (!interior || pw.slope_hi <= pw.slope_lo + 0.3)
    throw compute_error("threshold_scan: knee-not-found (no clear slope break in scan range)");

  ThresholdScan out;
  out.sweep = std::move(res);
  out.fit = {std::pow(10.0, pw.break_x), pw.slope_lo, pw.slope_hi, pw.rms_residual};
  out.sweep.summary = {{"knee_power_w", out.fit.threshold_power},
                       {"below_slope", out.fit.below_slope},
                       {"above_slope", out.fit.above_slope},
                       {"knee_residual", out.fit.knee_residual},
                       {"analytic_threshold_w", p_analytic}};
  return out;
}

SweepResult cooling_scan(const std::vector<double>& powers, const Device& dev,
                         const CoolingScanOptions& opt) {
  if (powers.empty()) throw validation_error("cooling_scan: no powers");
  if (!(opt.stoch.duration > 0.0)) throw validation_error("cooling_scan: duration must be > 0");
  if (!(opt.stoch.temperature > 0.0))
    throw validation_error("cooling_scan: thermal occupancy required (temperature > 0)");

  Device d = dev;
  d.set_splitting(d.mech.omega_m);
  const PhotonicMolecule mol = d.molecule();
  const Supermodes sm = mol.eigenmodes();
  const double rr = d.rabi();
  const NoiseModel noise = NoiseModel::from_temperature(opt.stoch.temperature, d.mech.omega_m);

  SweepResult res;
  res.axis = "pump_power_w";
  res.master_seed = opt.stoch.master_seed;
  res.points.resize(powers.size());

  parallel_for(int(powers.size()), opt.stoch.jobs, [&](int i) {
    PumpConfig pump;
    pump.power_in = powers[i];
    pump.branch = Branch::Red;
    pump.omega_laser = sm.omega_minus;

    const Inversion inv = inversion_from_pump(pump, sm);
    const GainResult g = mechanical_gain(inv.delta_n, sm, d.mech, rr);
    const double gamma_eff = d.mech.gamma_m + std::abs(g.gain);

    SimConfig cfg;
    cfg.dt = auto_dt(mol, std::span(&d.mech, 1), pump, opt.stoch.dt);
    cfg.duration = opt.stoch.duration;
    cfg.seed = opt.stoch.master_seed;
    cfg.run_index = uint64_t(i);
    cfg.noise_enabled = true;
    const double target_fs =
        opt.stoch.target_fs > 0.0 ? opt.stoch.target_fs : 60.0 * gamma_eff / kTwoPi;
    cfg.decimation = decimation_for(cfg.dt, target_fs);

    State init;
    init.b_amp = std::sqrt(noise.n_th);
    const Trajectory traj = integrate(cfg, mol, d.mech, pump, noise, init);
    const PhononStats ph = steady_phonon_number(traj, opt.stoch.discard_fraction);

    // Mechanical spectrum from the b series, shifted to quarter band so the
    // folded one-sided PSD shows the whole line.
    const double fs = traj.sample_rate();
    const size_t tail_start = size_t(opt.stoch.discard_fraction * double(traj.states.size()));
    std::vector<cplx> shifted;
    shifted.reserve(traj.states.size() - tail_start);
    for (size_t k = tail_start; k < traj.states.size(); ++k)
      shifted.push_back(traj.states[k].b_amp *
                        std::polar(1.0, -kTwoPi * 0.25 * fs * traj.times[k]));
    WelchConfig wcfg;
    wcfg.segment_length = opt.stoch.segment_length;
    const PSD psd = welch_psd(std::span<const cplx>(shifted), fs, wcfg);
    const double f0 = 0.25 * fs;
    const double half_window = std::max(8.0 * gamma_eff / kTwoPi, 30.0 * psd.resolution_bw);
    const LorentzianFit fit =
        lorentzian_fit(psd, {std::max(0.0, f0 - half_window),
                             std::min(psd.freqs.back(), f0 + half_window)});

    SweepPoint pt;
    pt.axis_value = powers[i];
    pt.scalars = {{"phonon_number", ph.mean},
                  {"phonon_std_error", ph.std_error},
                  {"n_ratio", ph.mean / noise.n_th},
                  {"predicted_ratio", d.mech.gamma_m / gamma_eff},
                  {"linewidth_hz", fit.fwhm},
                  {"predicted_linewidth_hz", gamma_eff / kTwoPi},
                  {"gain", g.gain}};
    if (!opt.stoch.out_dir.empty()) {
      const std::filesystem::path dir =
          std::filesystem::path(opt.stoch.out_dir) / point_dir_name(i);
      std::filesystem::create_directories(dir);
      io::write_psd(dir / "psd.csv", psd);
      pt.artifacts.emplace_back("psd", (dir / "psd.csv").string());
    }
    res.points[i] = std::move(pt);
  });

  res.summary = {{"n_th", noise.n_th},
                 {"analytic_threshold_w", threshold_power(sm, d.mech, rr, false)}};
  return res;
}

void write_sweep(const std::filesystem::path& dir, const SweepResult& result,
                 const std::string& experiment_name,
                 const std::vector<std::pair<std::string, std::string>>& config_echo) {
  std::filesystem::create_directories(dir);

  std::ofstream csv(dir / "result.csv");
  if (!csv) throw validation_error("cannot open result.csv in " + dir.string());
  csv << "axis,axis_value,metric,value\n";
  for (const auto& pt : result.points)
    for (const auto& [k, v] : pt.scalars)
      csv << result.axis << ',' << io::g17(pt.axis_value) << ',' << k << ',' << io::g17(v)
          << '\n';

  nlohmann::json manifest;
  manifest["experiment"] = experiment_name;
  manifest["axis"] = result.axis;
  manifest["master_seed"] = result.master_seed;
  manifest["points"] = result.points.size();
  manifest["version"] = "0.1.0";
  nlohmann::json echo = nlohmann::json::object();
  for (const auto& [k, v] : config_echo) echo[k] = v;
  manifest["config"] = echo;
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [k, v] : result.summary) summary[k] = v;
  manifest["summary"] = summary;
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& pt : result.points) {
    nlohmann::json row = nlohmann::json::object();
    for (const auto& [k, v] : pt.artifacts) row[k] = v;
    artifacts.push_back(row);
  }
  manifest["artifacts"] = artifacts;

  std::ofstream mj(dir / "manifest.json");
  mj << manifest.dump(2) << '\n';
}

}  // namespace pmol
