#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "pmol/experiments.hpp"
#include "pmol/io.hpp"

namespace fs = std::filesystem;
using namespace pmol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  bool quiet = false;
  int jobs = 1;
  std::vector<std::string> overrides;
};

cli::RunConfig load(const GlobalOpts& g, const char* subcommand) {
  if (g.config_path.empty()) throw validation_error("--config is required");
  cli::RunConfig cfg = cli::load_config(g.config_path, g.overrides);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (!cfg.experiment.name.empty() && cfg.experiment.name != subcommand)
    throw validation_error("config [experiment] name = " + cfg.experiment.name +
                           " does not match subcommand " + subcommand);
  return cfg;
}

fs::path run_dir(const cli::RunConfig& cfg, const char* subcommand) {
  fs::path dir = cfg.out_dir.empty() ? fs::path("runs") / subcommand : fs::path(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_echo(const fs::path& dir, const cli::RunConfig& cfg) {
  std::ofstream out(dir / "resolved.cfg");
  out << cli::echo_config(cfg);
}

std::vector<std::pair<std::string, std::string>> echo_pairs(const cli::RunConfig& cfg) {
  return {{"resolved", cli::echo_config(cfg)}};
}

void print_table(const SweepResult& res, const std::string& headline, bool quiet) {
  if (quiet) return;
  std::printf("%18s  %16s\n", res.axis.c_str(), headline.c_str());
  for (const auto& pt : res.points) {
    double v = 0.0;
    for (const auto& [k, val] : pt.scalars)
      if (k == headline) v = val;
    std::printf("%18.8g  %16.8g\n", pt.axis_value, v);
  }
}

StochasticOptions stoch_from(const cli::RunConfig& cfg, const GlobalOpts& g) {
  StochasticOptions s;
  s.duration = cfg.duration;
  s.dt = cfg.dt;
  s.temperature = cfg.temperature;
  s.master_seed = cfg.seed;
  s.jobs = g.jobs;
  return s;
}

std::vector<double> log_powers(const cli::ExperimentConfig& e) {
  if (!(e.power_min > 0.0 && e.power_max > e.power_min && e.points >= 2))
    throw validation_error("experiment needs power_min < power_max and points >= 2");
  std::vector<double> p(e.points);
  for (int i = 0; i < e.points; ++i)
    p[i] = e.power_min * std::pow(e.power_max / e.power_min, double(i) / double(e.points - 1));
  return p;
}

int cmd_splitting(const GlobalOpts& g) {
  cli::RunConfig cfg = load(g, "splitting");
  const auto& e = cfg.experiment;
  if (!(e.gap_max > e.gap_min) || e.points < 3)
    throw validation_error("splitting experiment needs gap_min < gap_max and points >= 3");
  std::vector<double> gaps(e.points);
  for (int i = 0; i < e.points; ++i)
    gaps[i] = e.gap_min + (e.gap_max - e.gap_min) * double(i) / double(e.points - 1);
  SweepResult res = splitting_sweep(gaps, cfg.device);
  res.master_seed = cfg.seed;
  const fs::path dir = run_dir(cfg, "splitting");
  write_sweep(dir, res, "splitting", echo_pairs(cfg));
  write_echo(dir, cfg);
  print_table(res, "splitting_hz", g.quiet);
  if (!g.quiet)
    std::printf("log-fit R^2 = %.6f, decay length = %.4g m\n",
                res.summary_value("log_fit_r_squared"),
                res.summary_value("fitted_decay_length_m"));
  return 0;
}

int cmd_crossing(const GlobalOpts& g) {
  cli::RunConfig cfg = load(g, "crossing");
  const auto& e = cfg.experiment;
  if (!(e.detune_span > 0.0) || e.points < 3)
    throw validation_error("crossing experiment needs detune_span > 0 and points >= 3");
  std::vector<double> detunings(e.points);
  for (int i = 0; i < e.points; ++i)
    detunings[i] = -0.5 * e.detune_span + e.detune_span * double(i) / double(e.points - 1);
  SweepResult res = avoided_crossing_sweep(detunings, cfg.device.kappa, cfg.device);
  res.master_seed = cfg.seed;
  const fs::path dir = run_dir(cfg, "crossing");
  write_sweep(dir, res, "crossing", echo_pairs(cfg));
  write_echo(dir, cfg);
  print_table(res, "separation_rad_s", g.quiet);
  if (!g.quiet)
    std::printf("minimum separation %.6g rad/s at detuning %.6g rad/s (2*kappa = %.6g)\n",
                res.summary_value("min_separation_rad_s"),
                res.summary_value("min_separation_at_rad_s"), 2.0 * cfg.device.kappa);
  return 0;
}

int cmd_gain_tune(const GlobalOpts& g) {
  cli::RunConfig cfg = load(g, "gain-tune");
  const auto& e = cfg.experiment;
  if (e.splittings.empty()) throw validation_error("gain-tune experiment needs splittings");

  GainTuneOptions opt;
  opt.stoch = stoch_from(cfg, g);
  opt.pump_power = cfg.pump_power;
  if (e.bg_spacing > 0.0) {
    for (double w = e.bg_from; w <= e.bg_to + 0.5 * e.bg_spacing; w += e.bg_spacing) {
      MechanicalMode m = cfg.device.mech;
      m.omega_m = w;
      m.gamma_m = e.bg_linewidth;
      opt.background.push_back(m);
    }
  }
  const fs::path dir = run_dir(cfg, "gain-tune");
  opt.stoch.out_dir = dir.string();
  SweepResult res = gain_tuning_sweep(e.splittings, {cfg.device.mech}, cfg.device, opt);
  res.master_seed = cfg.seed;
  write_sweep(dir, res, "gain-tune", echo_pairs(cfg));
  write_echo(dir, cfg);
  print_table(res, "bump_center_hz", g.quiet);
  return 0;
}

int cmd_threshold(const GlobalOpts& g) {
  cli::RunConfig cfg = load(g, "threshold");
  ThresholdScanOptions opt;
  opt.stoch = stoch_from(cfg, g);
  opt.pump_at_fwhm = cfg.pump_at_fwhm;
  const fs::path dir = run_dir(cfg, "threshold");
  opt.stoch.out_dir = dir.string();
  ThresholdScan scan = threshold_scan(log_powers(cfg.experiment), cfg.device, opt);
  scan.sweep.master_seed = cfg.seed;
  write_sweep(dir, scan.sweep, "threshold", echo_pairs(cfg));
  write_echo(dir, cfg);
  print_table(scan.sweep, "rf_line_power", g.quiet);
  if (!g.quiet)
    std::printf(
        "fitted knee %.4g W (analytic %.4g W); log-log slopes %.2f below, %.2f above\n",
        scan.fit.threshold_power, scan.sweep.summary_value("analytic_threshold_w"),
        scan.fit.below_slope, scan.fit.above_slope);
  return 0;
}

int cmd_cooling(const GlobalOpts& g) {
  cli::RunConfig cfg = load(g, "cooling");
  if (cfg.branch != Branch::Red)
    throw validation_error("cooling experiment requires pump.branch = red");
  const auto& e = cfg.experiment;
  if (!(e.power_max > 0.0) || e.points < 2)
    throw validation_error("cooling experiment needs power_max > 0 and points >= 2");
  std::vector<double> powers;
  const int steps = e.include_zero ? e.points - 1 : e.points;
  if (e.include_zero) powers.push_back(0.0);
  for (int i = 1; i <= steps; ++i)
    powers.push_back(e.power_max * double(i) / double(steps));

  CoolingScanOptions opt;
  opt.stoch = stoch_from(cfg, g);
  const fs::path dir = run_dir(cfg, "cooling");
  opt.stoch.out_dir = dir.string();
  SweepResult res = cooling_scan(powers, cfg.device, opt);
  res.master_seed = cfg.seed;
  write_sweep(dir, res, "cooling", echo_pairs(cfg));
  write_echo(dir, cfg);
  print_table(res, "n_ratio", g.quiet);
  return 0;
}

int cmd_simulate(const GlobalOpts& g) {
  cli::RunConfig cfg = load(g, "simulate");
  const Device& d = cfg.device;
  const PhotonicMolecule mol = d.molecule();
  const Supermodes sm = mol.eigenmodes();

  PumpConfig pump;
  pump.power_in = cfg.pump_power;
  pump.branch = cfg.branch;
  const double base = cfg.branch == Branch::Blue ? sm.omega_plus : sm.omega_minus;
  pump.omega_laser =
      base + cfg.pump_detuning + (cfg.pump_at_fwhm ? 0.5 * sm.gamma_bar : 0.0);

  SimConfig sim;
  sim.dt = cfg.dt > 0.0 ? cfg.dt
                        : 0.9 * max_admissible_dt(mol, std::span(&d.mech, 1), pump);
  if (!(cfg.duration > 0.0)) throw validation_error("sim.duration must be > 0");
  sim.duration = cfg.duration;
  sim.seed = cfg.seed;
  sim.noise_enabled = cfg.noise;
  sim.clamp_pump = cfg.clamp;
  if (cfg.decimation > 0) {
    sim.decimation = cfg.decimation;
  } else {
    const double target_fs = 2.6 * (std::max(sm.splitting, d.mech.omega_m) + sm.gamma_bar) / kTwoPi;
    sim.decimation = std::max(1, int(std::floor(1.0 / (sim.dt * target_fs))));
  }

  NoiseModel noise = NoiseModel::from_temperature(cfg.temperature, d.mech.omega_m);
  if (cfg.n_th_override) noise.n_th = *cfg.n_th_override;

  State init;
  init.b_amp = cfg.noise ? std::sqrt(noise.n_th) : 0.0;
  const Trajectory traj = integrate(sim, mol, d.mech, pump, noise, init);

  const fs::path dir = run_dir(cfg, "simulate");
  io::write_trajectory(dir / "trajectory.csv", traj);
  write_echo(dir, cfg);
  if (!g.quiet) {
    const State& last = traj.states.back();
    std::printf("wrote %zu frames to %s\n", traj.states.size(),
                (dir / "trajectory.csv").string().c_str());
    std::printf("final |a+|^2 = %.6g, |a-|^2 = %.6g, |b|^2 = %.6g\n", std::norm(last.a_plus),
                std::norm(last.a_minus), std::norm(last.b_amp));
  }
  return 0;
}

int cmd_analyze_psd(const GlobalOpts& g, const std::string& input, const std::string& signal,
                    int segment, const std::vector<double>& fit_window) {
  const Trajectory traj = io::read_trajectory(input);
  const double fs = traj.sample_rate();
  if (!(fs > 0.0)) throw validation_error("trajectory has fewer than 2 frames");

  WelchConfig wcfg;
  wcfg.segment_length = segment;
  PSD psd;
  if (signal == "photocurrent") {
    // Weights reconstructed from the sidecar metadata.
    const double s_in = traj.meta.drive_on
                            ? std::sqrt(traj.meta.pump.power_in /
                                        (codata.hbar * traj.meta.pump.omega_laser))
                            : 0.0;
    const double wp = std::cos(traj.meta.mixing_angle);
    const double wm = std::sin(traj.meta.mixing_angle);
    const double root_gext = std::sqrt(traj.meta.gamma_ext);
    std::vector<double> pc;
    pc.reserve(traj.states.size());
    for (const State& s : traj.states) {
      const cplx field = s_in - root_gext * (wp * s.a_plus + wm * s.a_minus);
      pc.push_back(codata.hbar * traj.meta.pump.omega_laser * std::norm(field));
    }
    psd = welch_psd(std::span<const double>(pc), fs, wcfg);
  } else if (signal == "b" || signal == "a_plus" || signal == "a_minus") {
    std::vector<cplx> series;
    series.reserve(traj.states.size());
    for (size_t i = 0; i < traj.states.size(); ++i) {
      cplx v = signal == "b" ? traj.states[i].b_amp
               : signal == "a_plus" ? traj.states[i].a_plus
                                    : traj.states[i].a_minus;
      // Quarter-band shift so a near-DC line is fully visible one-sided.
      if (signal == "b") v *= std::polar(1.0, -kTwoPi * 0.25 * fs * traj.times[i]);
      series.push_back(v);
    }
    psd = welch_psd(std::span<const cplx>(series), fs, wcfg);
  } else {
    throw validation_error("unknown signal '" + signal + "'");
  }

  fs::path dir = g.out_dir.empty() ? fs::path(input).parent_path() : fs::path(g.out_dir);
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  io::write_psd(dir / "psd.csv", psd);
  if (!g.quiet)
    std::printf("wrote %s (rbw %.4g Hz, %d segments, parseval %.4f)\n",
                (dir / "psd.csv").string().c_str(), psd.resolution_bw,
                psd.estimator.segment_count, psd.estimator.parseval_ratio);
  if (fit_window.size() == 2) {
    const LorentzianFit fit = lorentzian_fit(psd, {fit_window[0], fit_window[1]});
    std::printf("lorentzian: center %.8g Hz, fwhm %.6g Hz, height %.6g, background %.6g\n",
                fit.center, fit.fwhm, fit.height, fit.background);
    if (signal == "b")
      std::printf("(b spectrum is quarter-band shifted: physical offset = center - %.8g Hz)\n",
                  0.25 * fs);
  }
  return 0;
}

int cmd_calibrate(const GlobalOpts& g, const std::string& input) {
  std::ifstream in(input);
  if (!in) throw validation_error("cannot open samples file " + input);
  std::vector<std::pair<double, double>> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.find_first_of("0123456789+-.") != 0) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw validation_error("calibrate: rows must be gap_m,splitting_rad_s");
    samples.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  const CouplingCalibration cal = calibrate_coupling(samples);
  std::printf("kappa_0 = %.8g rad/s (%.6g Hz), decay_length = %.8g m, rms(ln) = %.3g\n",
              cal.model.kappa_0, cal.model.kappa_0 / kTwoPi, cal.model.decay_length,
              cal.rms_log_residual);
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    std::ofstream out(fs::path(g.out_dir) / "coupling.json");
    out << "{\n  \"kappa_0_rad_s\": " << io::g17(cal.model.kappa_0)
        << ",\n  \"decay_length_m\": " << io::g17(cal.model.decay_length)
        << ",\n  \"rms_log_residual\": " << io::g17(cal.rms_log_residual) << "\n}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmol: two-level photonic-molecule phonon laser simulator"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "config file (.cfg)");
  app.add_option("--out", g.out_dir, "output directory override");
  uint64_t seed_val = 0;
  auto* seed_opt = app.add_option("--seed", seed_val, "master seed override");
  app.add_flag("--quiet", g.quiet, "suppress summary tables");
  app.add_option("--jobs", g.jobs, "parallel sweep points")->check(CLI::PositiveNumber);
  app.add_option("--set", g.overrides, "override config entries (section.key=value)");

  auto* splitting = app.add_subcommand("splitting", "splitting vs gap sweep");
  auto* crossing = app.add_subcommand("crossing", "avoided-crossing sweep");
  auto* gain_tune = app.add_subcommand("gain-tune", "gain-bump tuning sweep");
  auto* threshold = app.add_subcommand("threshold", "pump-power threshold scan");
  auto* cooling = app.add_subcommand("cooling", "red-pump cooling scan");
  auto* simulate = app.add_subcommand("simulate", "single stochastic trajectory");

  auto* analyze = app.add_subcommand("analyze-psd", "PSD of a stored trajectory");
  std::string an_input, an_signal = "photocurrent";
  int an_segment = 0;
  std::vector<double> an_fit;
  analyze->add_option("--input", an_input, "trajectory.csv path")->required();
  analyze->add_option("--signal", an_signal, "photocurrent|b|a_plus|a_minus");
  analyze->add_option("--segment", an_segment, "welch segment length");
  analyze->add_option("--fit", an_fit, "lorentzian fit window fmin fmax (Hz)")->expected(2);

  auto* calibrate = app.add_subcommand("calibrate", "fit the gap law from samples");
  std::string cal_input;
  calibrate->add_option("--input", cal_input, "csv of gap_m,splitting_rad_s")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed_val;

  try {
    if (splitting->parsed()) return cmd_splitting(g);
    if (crossing->parsed()) return cmd_crossing(g);
    if (gain_tune->parsed()) return cmd_gain_tune(g);
    if (threshold->parsed()) return cmd_threshold(g);
    if (cooling->parsed()) return cmd_cooling(g);
    if (simulate->parsed()) return cmd_simulate(g);
    if (analyze->parsed()) return cmd_analyze_psd(g, an_input, an_signal, an_segment, an_fit);
    if (calibrate->parsed()) return cmd_calibrate(g, cal_input);
  } catch (const validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const compute_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
