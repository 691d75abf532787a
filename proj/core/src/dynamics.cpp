#include "pmol/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmol/fit.hpp"
#include "pmol/rng.hpp"

namespace pmol {

namespace {

constexpr cplx kMinusI{0.0, -1.0};

struct StepCtx {
  cplx lin_p{}, lin_m{};
  std::vector<cplx> lin_b;
  std::vector<double> half_rabi;
  cplx drive_p{}, drive_m{};
  bool clamp_p = false, clamp_m = false;
  std::vector<double> sig_b;  // per-quadrature noise amplitude per step
  double sig_p = 0.0, sig_m = 0.0;
  bool noise = false;
};

inline void eval_drift(const StepCtx& c, cplx ap, cplx am, const cplx* b, cplx& dap, cplx& dam,
                       cplx* db) {
  cplx coupling{};
  const size_t m = c.half_rabi.size();
  for (size_t j = 0; j < m; ++j) coupling += c.half_rabi[j] * b[j];
  dap = c.clamp_p ? cplx{} : c.lin_p * ap + kMinusI * coupling * am + c.drive_p;
  dam = c.clamp_m ? cplx{} : c.lin_m * am + kMinusI * std::conj(coupling) * ap + c.drive_m;
  const cplx beat = std::conj(am) * ap;
  for (size_t j = 0; j < m; ++j)
    db[j] = c.lin_b[j] * b[j] + kMinusI * (c.half_rabi[j] * beat);
}

struct FrameSetup {
  Supermodes sm;
  double delta_drive = 0.0;
  double gamma_ext_eff = 0.0;
  double s_in = 0.0;
};

FrameSetup make_frames(const PhotonicMolecule& molecule, const PumpConfig& pump) {
  FrameSetup f;
  f.sm = molecule.eigenmodes();
  const double omega_driven =
      pump.branch == Branch::Blue ? f.sm.omega_plus : f.sm.omega_minus;
  f.delta_drive = omega_driven - pump.omega_laser;
  const double c = std::cos(f.sm.mixing_angle), s = std::sin(f.sm.mixing_angle);
  const double weight2 = pump.branch == Branch::Blue ? c * c : s * s;
  f.gamma_ext_eff = molecule.mode1.gamma_ext * weight2;
  f.s_in = pump.power_in > 0.0
               ? std::sqrt(pump.power_in / (codata.hbar * pump.omega_laser))
               : 0.0;
  return f;
}

StepCtx make_ctx(const SimConfig& cfg, const FrameSetup& f, const PumpConfig& pump,
                 std::span<const MechOscillator> oscs, const NoiseModel& optical_noise) {
  StepCtx c;
  const double damp = cfg.damping_enabled ? 1.0 : 0.0;
  c.lin_p = cplx(0.0, -f.delta_drive) - 0.5 * damp * f.sm.gamma_plus;
  c.lin_m = cplx(0.0, -f.delta_drive) - 0.5 * damp * f.sm.gamma_minus;
  const cplx drive = std::sqrt(f.gamma_ext_eff) * f.s_in;
  if (pump.branch == Branch::Blue)
    c.drive_p = drive;
  else
    c.drive_m = drive;
  if (cfg.clamp_pump) {
    c.clamp_p = pump.branch == Branch::Blue;
    c.clamp_m = pump.branch == Branch::Red;
  }

  c.lin_b.reserve(oscs.size());
  c.half_rabi.reserve(oscs.size());
  c.sig_b.reserve(oscs.size());
  for (const auto& o : oscs) {
    c.lin_b.push_back(cplx(0.0, -(o.mode.omega_m - f.sm.splitting)) -
                      0.5 * damp * o.mode.gamma_m);
    c.half_rabi.push_back(0.5 * o.rabi);
    c.sig_b.push_back(cfg.noise_enabled
                          ? std::sqrt(0.5 * o.mode.gamma_m * o.n_th * cfg.dt)
                          : 0.0);
  }
  c.noise = cfg.noise_enabled;

  if (cfg.noise_enabled && optical_noise.optical_noise && optical_noise.bath_temp > 0.0) {
    // Bose occupancy at the optical frequency; essentially zero at 1550 nm
    // and room temperature.
    const double x = codata.hbar * 0.5 * (f.sm.omega_plus + f.sm.omega_minus) /
                     (codata.k_B * optical_noise.bath_temp);
    const double n_opt = 1.0 / std::expm1(x);
    c.sig_p = std::sqrt(0.5 * f.sm.gamma_plus * n_opt * cfg.dt);
    c.sig_m = std::sqrt(0.5 * f.sm.gamma_minus * n_opt * cfg.dt);
  }
  return c;
}

void validate_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw validation_error("SimConfig.dt must be > 0");
  if (!(cfg.duration >= 100.0 * cfg.dt))
    throw validation_error("SimConfig.duration must be >= 100*dt");
  if (cfg.decimation < 1) throw validation_error("SimConfig.decimation must be >= 1");
}

double guard_rate(const FrameSetup& f, std::span<const MechOscillator> oscs) {
  double rate = std::max({std::abs(f.delta_drive), f.sm.gamma_plus, f.sm.gamma_minus});
  for (const auto& o : oscs) {
    rate = std::max(rate, std::abs(o.mode.omega_m - f.sm.splitting));
    rate = std::max(rate, o.mode.gamma_m);
  }
  return rate;
}

void check_dt(const SimConfig& cfg, const FrameSetup& f, std::span<const MechOscillator> oscs) {
  if (cfg.skip_dt_check) return;
  const double rate = guard_rate(f, oscs);
  if (rate <= 0.0) return;
  const double dt_max = 1.0 / (20.0 * rate);
  if (cfg.dt > dt_max) {
    std::ostringstream msg;
    msg << "SimConfig.dt = " << cfg.dt << " s violates the stability bound; "
        << "maximum admissible dt = " << dt_max << " s for the configured rates";
    throw validation_error(msg.str());
  }
}

[[noreturn]] void abort_nonfinite(double t, long long step) {
  std::ostringstream msg;
  msg << "integration aborted: non-finite state at t = " << t << " s (step " << step << ")";
  throw compute_error(msg.str());
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Shared fixed-step core. Calls record(t, a_plus, a_minus, bs) in integration
// frames every `decimation` steps (including step 0).
void run_core(const SimConfig& cfg, const StepCtx& ctx, cplx ap, cplx am, std::vector<cplx> b,
              const std::function<void(double, cplx, cplx, std::span<const cplx>)>& record) {
  const long long n_steps = std::llround(cfg.duration / cfg.dt);
  if (n_steps < 2 * cfg.decimation)
    throw validation_error("SimConfig.decimation too coarse for the configured duration");

  const size_t m = b.size();
  const double dt = cfg.dt;
  std::vector<cplx> k1(m), k2(m), k3(m), k4(m), bt(m), xi(m);
  cplx kap1, kam1, kap2, kam2, kap3, kam3, kap4, kam4, apt, amt;

  const Philox rng(cfg.seed, cfg.run_index);
  const bool opt_noise = ctx.sig_p > 0.0 || ctx.sig_m > 0.0;
  const uint64_t stride = uint64_t(m) + (opt_noise ? 2 : 0);

  record(0.0, ap, am, b);

  for (long long step = 0; step < n_steps; ++step) {
    if (ctx.noise) {
      // Heun with additive increments: the same noise enters the predictor
      // and the corrected update.
      cplx xip{}, xim{};
      const uint64_t base = uint64_t(step) * stride;
      for (size_t j = 0; j < m; ++j) {
        double z0, z1;
        rng.normal_pair(base + j, z0, z1);
        xi[j] = ctx.sig_b[j] * cplx(z0, z1);
      }
      if (opt_noise) {
        double z0, z1;
        rng.normal_pair(base + m, z0, z1);
        xip = ctx.sig_p * cplx(z0, z1);
        rng.normal_pair(base + m + 1, z0, z1);
        xim = ctx.sig_m * cplx(z0, z1);
      }
      if (ctx.clamp_p) xip = 0.0;
      if (ctx.clamp_m) xim = 0.0;

      eval_drift(ctx, ap, am, b.data(), kap1, kam1, k1.data());
      apt = ap + dt * kap1 + xip;
      amt = am + dt * kam1 + xim;
      for (size_t j = 0; j < m; ++j) bt[j] = b[j] + dt * k1[j] + xi[j];
      eval_drift(ctx, apt, amt, bt.data(), kap2, kam2, k2.data());
      ap += 0.5 * dt * (kap1 + kap2) + xip;
      am += 0.5 * dt * (kam1 + kam2) + xim;
      for (size_t j = 0; j < m; ++j) b[j] += 0.5 * dt * (k1[j] + k2[j]) + xi[j];
    } else {
      eval_drift(ctx, ap, am, b.data(), kap1, kam1, k1.data());
      apt = ap + 0.5 * dt * kap1;
      amt = am + 0.5 * dt * kam1;
      for (size_t j = 0; j < m; ++j) bt[j] = b[j] + 0.5 * dt * k1[j];
      eval_drift(ctx, apt, amt, bt.data(), kap2, kam2, k2.data());
      apt = ap + 0.5 * dt * kap2;
      amt = am + 0.5 * dt * kam2;
      for (size_t j = 0; j < m; ++j) bt[j] = b[j] + 0.5 * dt * k2[j];
      eval_drift(ctx, apt, amt, bt.data(), kap3, kam3, k3.data());
      apt = ap + dt * kap3;
      amt = am + dt * kam3;
      for (size_t j = 0; j < m; ++j) bt[j] = b[j] + dt * k3[j];
      eval_drift(ctx, apt, amt, bt.data(), kap4, kam4, k4.data());
      ap += dt / 6.0 * (kap1 + 2.0 * kap2 + 2.0 * kap3 + kap4);
      am += dt / 6.0 * (kam1 + 2.0 * kam2 + 2.0 * kam3 + kam4);
      for (size_t j = 0; j < m; ++j)
        b[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }

    const long long done = step + 1;
    if (done % cfg.decimation == 0) {
      const double t = double(done) * dt;
      bool ok = finite(ap) && finite(am);
      for (size_t j = 0; ok && j < m; ++j) ok = finite(b[j]);
      if (!ok) abort_nonfinite(t, done);
      record(t, ap, am, b);
    }
  }
}

}  // namespace

NoiseModel NoiseModel::from_temperature(double temp_kelvin, double omega_m) {
  if (temp_kelvin < 0.0) throw validation_error("NoiseModel temperature must be >= 0");
  if (!(omega_m > 0.0)) throw validation_error("NoiseModel omega_m must be > 0");
  NoiseModel n;
  n.bath_temp = temp_kelvin;
  n.n_th = codata.k_B * temp_kelvin / (codata.hbar * omega_m);
  return n;
}

void NoiseModel::validate() const {
  if (n_th < 0.0) throw validation_error("NoiseModel.n_th must be >= 0");
}

double max_admissible_dt(const PhotonicMolecule& molecule,
                         std::span<const MechanicalMode> mechs, const PumpConfig& pump) {
  const FrameSetup f = make_frames(molecule, pump);
  std::vector<MechOscillator> oscs;
  oscs.reserve(mechs.size());
  for (const auto& mm : mechs) oscs.push_back({mm, 0.0, 0.0});
  const double rate = guard_rate(f, oscs);
  return rate > 0.0 ? 1.0 / (20.0 * rate) : std::numeric_limits<double>::infinity();
}

State drift(const State& s, const PhotonicMolecule& molecule, const MechanicalMode& mech,
            const PumpConfig& pump, double rabi) {
  molecule.validate();
  mech.validate();
  pump.validate();
  SimConfig cfg;
  cfg.damping_enabled = true;
  cfg.dt = 1.0;  // unused by the drift itself
  const FrameSetup f = make_frames(molecule, pump);
  const MechOscillator osc{mech, rabi, 0.0};
  const StepCtx ctx = make_ctx(cfg, f, pump, std::span(&osc, 1), NoiseModel{});
  State d;
  cplx db;
  eval_drift(ctx, s.a_plus, s.a_minus, &s.b_amp, d.a_plus, d.a_minus, &db);
  d.b_amp = db;
  return d;
}

Trajectory integrate(const SimConfig& cfg, const PhotonicMolecule& molecule,
                     const MechanicalMode& mech, const PumpConfig& pump, const NoiseModel& noise,
                     const State& initial, std::optional<double> rabi) {
  validate_config(cfg);
  molecule.validate();
  mech.validate();
  pump.validate();
  noise.validate();

  const double omega_r = rabi.value_or(rabi_rate(molecule, mech));
  const FrameSetup f = make_frames(molecule, pump);
  const MechOscillator osc{mech, omega_r, noise.n_th};
  check_dt(cfg, f, std::span(&osc, 1));
  const StepCtx ctx = make_ctx(cfg, f, pump, std::span(&osc, 1), noise);

  Trajectory traj;
  traj.frames = {pump.omega_laser, f.sm.splitting, f.delta_drive,
                 mech.omega_m - f.sm.splitting, pump.branch};
  traj.meta = {cfg,    noise,
               pump,   f.sm,
               mech,   omega_r,
               molecule.mode1.gamma_ext, f.sm.mixing_angle,
               pump.power_in > 0.0};

  const long long n_steps = std::llround(cfg.duration / cfg.dt);
  traj.times.reserve(size_t(n_steps / cfg.decimation) + 1);
  traj.states.reserve(size_t(n_steps / cfg.decimation) + 1);

  // Stored optics are re-phased into the common laser frame: the undriven
  // branch picks up the splitting rotation.
  const double dw = f.sm.splitting;
  const bool blue = pump.branch == Branch::Blue;
  run_core(cfg, ctx, initial.a_plus, initial.a_minus, {initial.b_amp},
           [&](double t, cplx ap, cplx am, std::span<const cplx> bs) {
             State s;
             if (blue) {
               s.a_plus = ap;
               s.a_minus = am * std::polar(1.0, dw * t);
             } else {
               s.a_plus = ap * std::polar(1.0, -dw * t);
               s.a_minus = am;
             }
             s.b_amp = bs[0];
             traj.times.push_back(t);
             traj.states.push_back(s);
           });
  return traj;
}

void integrate_multimode(const SimConfig& cfg, const PhotonicMolecule& molecule,
                         const PumpConfig& pump, std::span<const MechOscillator> oscillators,
                         const State& optical_initial, std::span<const cplx> b_initial,
                         const NoiseModel& optical_noise, const MultiModeRecord& record) {
  validate_config(cfg);
  molecule.validate();
  pump.validate();
  if (oscillators.empty()) throw validation_error("integrate_multimode: no mechanical modes");
  if (b_initial.size() != oscillators.size())
    throw validation_error("integrate_multimode: b_initial size mismatch");
  for (const auto& o : oscillators) o.mode.validate();

  const FrameSetup f = make_frames(molecule, pump);
  check_dt(cfg, f, oscillators);
  const StepCtx ctx = make_ctx(cfg, f, pump, oscillators, optical_noise);

  const double dw = f.sm.splitting;
  const bool blue = pump.branch == Branch::Blue;
  run_core(cfg, ctx, optical_initial.a_plus, optical_initial.a_minus,
           std::vector<cplx>(b_initial.begin(), b_initial.end()),
           [&](double t, cplx ap, cplx am, std::span<const cplx> bs) {
             if (blue)
               am *= std::polar(1.0, dw * t);
             else
               ap *= std::polar(1.0, -dw * t);
             record(t, ap, am, bs);
           });
}

double small_signal_growth_rate(const Trajectory& traj, std::pair<double, double> window) {
  if (traj.times.empty()) throw validation_error("small_signal_growth_rate: empty trajectory");
  if (!(window.first < window.second) || window.first < traj.times.front() ||
      window.second > traj.times.back())
    throw validation_error("small_signal_growth_rate: window must lie inside the trajectory");

  std::vector<double> t, y;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < window.first || traj.times[i] > window.second) continue;
    const double n = std::norm(traj.states[i].b_amp);
    if (!(n > 0.0))
      throw compute_error("small_signal_growth_rate: fit-unreliable, |b|^2 not strictly positive");
    t.push_back(traj.times[i]);
    y.push_back(std::log(n));
  }
  if (t.size() < 10)
    throw validation_error("small_signal_growth_rate: fewer than 10 samples in window");

  const double total = y.back() - y.front();
  const double dir = total >= 0.0 ? 1.0 : -1.0;
  int reversals = 0;
  for (size_t i = 1; i < y.size(); ++i) {
    const double step = (y[i] - y[i - 1]) * dir;
    if (step < -1e-9 * std::max(1.0, std::abs(y[i - 1]))) ++reversals;
  }
  if (reversals > 0) {
    std::ostringstream msg;
    msg << "small_signal_growth_rate: fit-unreliable, non-monotone |b|^2 (" << reversals
        << " reversals over " << y.size() << " samples, total change " << total << ")";
    throw compute_error(msg.str());
  }

  const LineFit fit = fit_line(t, y);
  if (std::abs(total) > 1e-6 && fit.r_squared < 0.99) {
    std::ostringstream msg;
    msg << "small_signal_growth_rate: fit-unreliable, R^2 = " << fit.r_squared;
    throw compute_error(msg.str());
  }
  return fit.slope;
}

std::pair<double, double> manley_rowe_residuals(const Trajectory& traj) {
  const auto& m = traj.meta;
  if (m.sim.noise_enabled || m.sim.damping_enabled || m.drive_on)
    throw validation_error(
        "manley_rowe_residuals: invalid-context, requires damping, noise and drive off");
  if (traj.states.empty()) throw validation_error("manley_rowe_residuals: empty trajectory");

  auto c1 = [](const State& s) { return std::norm(s.a_plus) + std::norm(s.b_amp); };
  auto c2 = [](const State& s) { return std::norm(s.a_minus) - std::norm(s.b_amp); };
  const State& s0 = traj.states.front();
  const double scale = std::norm(s0.a_plus) + std::norm(s0.a_minus) + std::norm(s0.b_amp);
  const double d1 = std::abs(c1(s0)) > 1e-300 ? std::abs(c1(s0)) : scale;
  const double d2 = std::abs(c2(s0)) > 1e-300 ? std::abs(c2(s0)) : scale;

  double r1 = 0.0, r2 = 0.0;
  for (const auto& s : traj.states) {
    r1 = std::max(r1, std::abs(c1(s) - c1(s0)) / d1);
    r2 = std::max(r2, std::abs(c2(s) - c2(s0)) / d2);
  }
  return {r1, r2};
}

PhononStats steady_phonon_number(const Trajectory& traj, double discard_fraction) {
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
    throw validation_error("steady_phonon_number: discard_fraction must be in [0,1)");
  const size_t n = traj.states.size();
  const size_t start = size_t(std::ceil(discard_fraction * double(n)));
  if (n < start + 16)
    throw validation_error("steady_phonon_number: insufficient retained samples");

  const double span = traj.times.back() - traj.times[start];
  const double gamma = traj.meta.mech.gamma_m;
  if (gamma > 0.0 && span < 10.0 / gamma)
    throw validation_error("steady_phonon_number: retained window shorter than 10/Gamma");

  const int blocks = 8;
  const size_t tail = n - start;
  const size_t block_len = tail / blocks;
  const size_t used_start = n - block_len * blocks;

  double block_mean[blocks];
  for (int k = 0; k < blocks; ++k) {
    double acc = 0.0;
    for (size_t i = 0; i < block_len; ++i)
      acc += std::norm(traj.states[used_start + size_t(k) * block_len + i].b_amp);
    block_mean[k] = acc / double(block_len);
  }
  double mean = 0.0;
  for (int k = 0; k < blocks; ++k) mean += block_mean[k];
  mean /= blocks;
  double var = 0.0;
  for (int k = 0; k < blocks; ++k) var += (block_mean[k] - mean) * (block_mean[k] - mean);
  var /= (blocks - 1);

  PhononStats st;
  st.mean = mean;
  st.std_error = std::sqrt(var / blocks);
  st.blocks = blocks;
  return st;
}

}  // namespace pmol
