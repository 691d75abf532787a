#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pmol/dynamics.hpp"
#include "pmol/experiments.hpp"
#include "pmol/fit.hpp"

using namespace pmol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Device highq_device(double q_mech) {
  Device dev = make_paper_device();
  dev.mech.gamma_m = dev.mech.omega_m / q_mech;
  return dev;
}

PumpConfig blue_resonant(const Device& dev, double power) {
  return {power, dev.molecule().eigenmodes().omega_plus, Branch::Blue};
}

/// Dimensionless Hamiltonian-only setup: degenerate frames, no damping.
struct ToyHamiltonian {
  PhotonicMolecule mol;
  MechanicalMode mech;
  PumpConfig pump;

  ToyHamiltonian() {
    mol.mode1 = {10.0, 0.0, 0.0};
    mol.mode2 = {10.0, 0.0, 0.0};
    mol.kappa = 0.5;                      // splitting 1 = mech frequency
    mech = {1.0, 1e-9, 1.0, 1.0};
    pump = {0.0, 10.5, Branch::Blue};     // laser on the blue branch
  }
};

}  // namespace

TEST_CASE("free mechanical decay is exponential") {
  const Device dev = make_paper_device();
  SimConfig cfg;
  cfg.dt = 0.8e-9;
  cfg.duration = 5.0 / dev.mech.gamma_m;
  cfg.decimation = 64;
  cfg.noise_enabled = false;
  State init;
  init.b_amp = 3.0;
  const Trajectory traj =
      integrate(cfg, dev.molecule(), dev.mech, blue_resonant(dev, 0.0), NoiseModel{}, init);

  const double t_end = traj.times.back();
  const double expected = 3.0 * std::exp(-0.5 * dev.mech.gamma_m * t_end);
  CHECK(rel(std::abs(traj.states.back().b_amp), expected) < 1e-8);

  // Uniform decimated time base, first frame at zero.
  CHECK(traj.times.front() == 0.0);
  const double step = traj.times[1] - traj.times[0];
  CHECK(step == doctest::Approx(cfg.dt * cfg.decimation).epsilon(1e-12));
  for (size_t i = 2; i < std::min<size_t>(traj.times.size(), 64); ++i)
    CHECK(traj.times[i] - traj.times[i - 1] == doctest::Approx(step).epsilon(1e-9));
}

TEST_CASE("drift structure") {
  ToyHamiltonian toy;

  SUBCASE("decoupled oscillators only rotate") {
    State s{cplx(0.3, 0.4), cplx(-0.2, 0.1), cplx(0.5, -0.6)};
    const State d = drift(s, toy.mol, toy.mech, toy.pump, 0.0);
    // d|a|^2/dt = 2 Re(conj(a) da) vanishes for pure phase rotation.
    CHECK(std::abs(2.0 * std::real(std::conj(s.a_plus) * d.a_plus)) < 1e-15);
    CHECK(std::abs(2.0 * std::real(std::conj(s.a_minus) * d.a_minus)) < 1e-15);
    CHECK(std::abs(2.0 * std::real(std::conj(s.b_amp) * d.b_amp)) < 1e-15);
  }

  SUBCASE("beat-note forcing at zero mechanical amplitude") {
    State s{cplx(0.8, 0.0), cplx(0.0, 0.4), cplx(0.0, 0.0)};
    const double rabi = 0.02;
    const State d = drift(s, toy.mol, toy.mech, toy.pump, rabi);
    const cplx expect = cplx(0.0, -0.5 * rabi) * std::conj(s.a_minus) * s.a_plus;
    CHECK(std::abs(d.b_amp - expect) < 1e-18);
  }
}

TEST_CASE("manley-rowe conservation") {
  ToyHamiltonian toy;
  SimConfig cfg;
  cfg.dt = 1.0;
  cfg.duration = 1e5;
  cfg.decimation = 10;
  cfg.noise_enabled = false;
  cfg.damping_enabled = false;
  State init{cplx(0.9, 0.0), 0.45 * std::polar(1.0, 0.63), 0.7 * std::polar(1.0, -0.45)};

  SUBCASE("hamiltonian-only run conserves both constants to 1e-6") {
    const Trajectory traj =
        integrate(cfg, toy.mol, toy.mech, toy.pump, NoiseModel{}, init, 0.01);
    const auto [r1, r2] = manley_rowe_residuals(traj);
    CHECK(r1 < 1e-6);
    CHECK(r2 < 1e-6);
  }

  SUBCASE("zero coupling keeps residuals at machine scale") {
    const Trajectory traj =
        integrate(cfg, toy.mol, toy.mech, toy.pump, NoiseModel{}, init, 0.0);
    const auto [r1, r2] = manley_rowe_residuals(traj);
    CHECK(r1 < 1e-12);
    CHECK(r2 < 1e-12);
  }

  SUBCASE("oversized steps grow the residual like dt^4") {
    // Detuned variant so the admissible step is finite.
    ToyHamiltonian det;
    det.mol.kappa = 0.65;  // splitting 1.3 vs mechanical 1.0
    const double dt_max = max_admissible_dt(det.mol, std::span(&det.mech, 1), det.pump);
    CHECK(dt_max == doctest::Approx(1.0 / (20.0 * 0.3)).epsilon(1e-12));

    auto residual_at = [&](double dt, bool skip) {
      SimConfig c;
      c.dt = dt;
      c.duration = 4000.0 * dt_max;
      c.decimation = 1;
      c.damping_enabled = false;
      c.skip_dt_check = skip;
      const Trajectory traj =
          integrate(c, det.mol, det.mech, det.pump, NoiseModel{}, init, 0.01);
      const auto [r1, r2] = manley_rowe_residuals(traj);
      return std::max(r1, r2);
    };
    const double r_ok = residual_at(dt_max, false);
    const double r_big = residual_at(10.0 * dt_max, true);
    CHECK(r_big > 1e3 * r_ok);  // fourth-order scaling gives ~1e4

    SimConfig bad;
    bad.dt = 10.0 * dt_max;
    bad.duration = 4000.0 * dt_max;
    CHECK_THROWS_WITH_AS(
        integrate(bad, det.mol, det.mech, det.pump, NoiseModel{}, init, 0.01),
        doctest::Contains("maximum admissible dt"), validation_error);
  }

  SUBCASE("context is enforced") {
    SimConfig damped = cfg;
    damped.damping_enabled = true;
    const Trajectory traj =
        integrate(damped, toy.mol, toy.mech, toy.pump, NoiseModel{}, init, 0.01);
    CHECK_THROWS_AS(manley_rowe_residuals(traj), validation_error);
  }
}

TEST_CASE("small-signal growth rate") {
  SUBCASE("recovers a synthetic exponential to 1e-10") {
    Trajectory traj;
    const double rate = 7.3e4;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 1e-7 * i;
      traj.times.push_back(t);
      traj.states.push_back({0.0, 0.0, std::exp(0.5 * rate * t) * std::polar(1.0, 0.1 * i)});
    }
    const double fitted = small_signal_growth_rate(traj, {0.0, 2e-4});
    CHECK(rel(fitted, rate) < 1e-10);
  }

  SUBCASE("clamped runs reproduce the gain law above and below threshold") {
    const Device dev = highq_device(2e4);
    const PhotonicMolecule mol = dev.molecule();
    const Supermodes sm = mol.eigenmodes();
    const double rabi = dev.rabi();
    const double n_threshold = sm.gamma_bar * dev.mech.gamma_m / (rabi * rabi);

    for (double factor : {2.0, 0.25}) {
      SimConfig cfg;
      cfg.dt = 0.8e-9;
      cfg.duration = 320e-6;
      cfg.decimation = 200;
      cfg.clamp_pump = true;
      State init;
      init.a_plus = std::sqrt(factor * n_threshold);
      init.b_amp = 1.0;
      const Trajectory traj =
          integrate(cfg, mol, dev.mech, blue_resonant(dev, 0.0), NoiseModel{}, init);
      const double measured = small_signal_growth_rate(traj, {5e-6, traj.times.back()});
      const GainResult g = mechanical_gain(factor * n_threshold, sm, dev.mech, rabi);
      CHECK(rel(measured, g.gain - dev.mech.gamma_m) < 0.01);
    }
  }

  SUBCASE("red-pump clamped runs never grow") {
    const Device dev = highq_device(2e4);
    const PhotonicMolecule mol = dev.molecule();
    const Supermodes sm = mol.eigenmodes();
    const double rabi = dev.rabi();
    const double n_threshold = sm.gamma_bar * dev.mech.gamma_m / (rabi * rabi);

    for (double factor : {0.5, 2.0, 4.0}) {
      for (double det : {0.0, 0.5 * sm.gamma_bar}) {
        Device d = dev;
        d.set_splitting(d.mech.omega_m + det);
        SimConfig cfg;
        cfg.dt = 0.8e-9;
        cfg.duration = 200e-6;
        cfg.decimation = 200;
        cfg.clamp_pump = true;
        PumpConfig pump{0.0, d.molecule().eigenmodes().omega_minus, Branch::Red};
        State init;
        init.a_minus = std::sqrt(factor * n_threshold);
        init.b_amp = 1.0;
        const Trajectory traj = integrate(cfg, d.molecule(), d.mech, pump, NoiseModel{}, init);
        const double measured = small_signal_growth_rate(traj, {5e-6, traj.times.back()});
        CHECK(measured < 0.0);
      }
    }
  }

  SUBCASE("window and reliability errors") {
    Trajectory traj;
    for (int i = 0; i <= 100; ++i) {
      const double t = 1e-6 * i;
      traj.times.push_back(t);
      traj.states.push_back({0.0, 0.0, 1.0 + 0.5 * std::sin(2e6 * t)});
    }
    CHECK_THROWS_AS(small_signal_growth_rate(traj, {-1.0, 1.0}), validation_error);
    CHECK_THROWS_AS(small_signal_growth_rate(traj, {0.0, 1e-4}), compute_error);
  }
}

TEST_CASE("thermal equilibrium of the langevin oscillator") {
  // Fast toy device; the paper-scale check lives in the acceptance suite.
  PhotonicMolecule mol;
  mol.mode1 = {1.2e15, kTwoPi * 0.5e5, kTwoPi * 0.5e5};
  mol.mode2 = {1.2e15, kTwoPi * 1e5, 0.0};
  mol.kappa = 0.5 * kTwoPi * 5e6;
  MechanicalMode mech{kTwoPi * 5e6, kTwoPi * 1e4, 1e-12, 30e-6};
  PumpConfig pump{0.0, mol.eigenmodes().omega_plus, Branch::Blue};

  NoiseModel noise;
  noise.n_th = 1000.0;

  SimConfig cfg;
  cfg.dt = 7.9e-8;
  cfg.duration = 0.16;
  cfg.decimation = 16;
  cfg.noise_enabled = true;
  cfg.seed = 12345;

  const Trajectory traj = integrate(cfg, mol, mech, pump, noise, State{}, 0.0);
  const PhononStats st = steady_phonon_number(traj, 0.2);
  CHECK(st.blocks >= 8);
  CHECK(std::abs(st.mean - noise.n_th) < 3.0 * st.std_error);
  CHECK(rel(st.mean, noise.n_th) < 0.08);

  SUBCASE("halving dt does not move the estimate beyond its error bars") {
    SimConfig half = cfg;
    half.dt = 0.5 * cfg.dt;
    half.seed = 777;
    const Trajectory traj2 = integrate(half, mol, mech, pump, noise, State{}, 0.0);
    const PhononStats st2 = steady_phonon_number(traj2, 0.2);
    CHECK(std::abs(st.mean - st2.mean) <
          2.0 * std::sqrt(st.std_error * st.std_error + st2.std_error * st2.std_error));
  }

  SUBCASE("zero state with noise and pump off stays zero") {
    SimConfig quiet = cfg;
    quiet.noise_enabled = false;
    quiet.duration = 0.02;
    const Trajectory traj0 = integrate(quiet, mol, mech, pump, NoiseModel{}, State{}, 0.0);
    CHECK(steady_phonon_number(traj0, 0.2).mean == 0.0);
  }

  SUBCASE("insufficient retained data is rejected") {
    CHECK_THROWS_AS(steady_phonon_number(traj, 0.9999), validation_error);
    SimConfig shorty = cfg;
    shorty.duration = 5.0 / mech.gamma_m;
    const Trajectory t2 = integrate(shorty, mol, mech, pump, noise, State{}, 0.0);
    CHECK_THROWS_AS(steady_phonon_number(t2, 0.5), validation_error);
  }
}

TEST_CASE("noise correlator normalization") {
  // Pure random walk: damping off, so <|b|^2> grows as Gamma n_th t.
  PhotonicMolecule mol;
  mol.mode1 = {1.2e15, 0.0, 0.0};
  mol.mode2 = {1.2e15, 0.0, 0.0};
  mol.kappa = 0.5e5;
  MechanicalMode mech{1e5, 1e4, 1.0, 1.0};
  PumpConfig pump{0.0, mol.eigenmodes().omega_plus, Branch::Blue};
  NoiseModel noise;
  noise.n_th = 50.0;

  SimConfig cfg;
  cfg.dt = 1e-6;
  cfg.duration = 1e-2;
  cfg.decimation = 5000;
  cfg.noise_enabled = true;
  cfg.damping_enabled = false;

  double acc = 0.0;
  const int runs = 64;
  for (int r = 0; r < runs; ++r) {
    SimConfig c = cfg;
    c.seed = 555;
    c.run_index = uint64_t(r);
    const Trajectory traj = integrate(c, mol, mech, pump, noise, State{}, 0.0);
    acc += std::norm(traj.states.back().b_amp);
  }
  const double expected = mech.gamma_m * noise.n_th * cfg.duration;
  CHECK(rel(acc / runs, expected) < 0.4);
}

TEST_CASE("saturated plateau matches the root-found fixed point") {
  const Device dev = make_paper_device();
  const PhotonicMolecule mol = dev.molecule();
  const Supermodes sm = mol.eigenmodes();
  const double rabi = dev.rabi();
  const double p2 = 2.0 * threshold_power(sm, dev.mech, rabi, false);
  const PumpConfig pump = blue_resonant(dev, p2);

  // Independent oracle: Newton on the stationary drift equations with the
  // linecenter reality ansatz (a+, a- real, b = -i c).
  auto stationary = [&](double x0, double x1, double x2) {
    State s{cplx(x0, 0.0), cplx(x1, 0.0), cplx(0.0, -x2)};
    const State d = drift(s, mol, dev.mech, pump, rabi);
    return std::array<double, 3>{d.a_plus.real(), d.a_minus.real(), d.b_amp.imag()};
  };
  const double gamma = sm.gamma_bar;
  double x[3];
  x[0] = std::sqrt(gamma * dev.mech.gamma_m) / rabi;  // gain-clamped photon amplitude
  x[1] = 0.5 * x[0];
  x[2] = rabi / dev.mech.gamma_m * x[1] * x[0];
  for (int it = 0; it < 60; ++it) {
    const auto f0 = stationary(x[0], x[1], x[2]);
    double jac[9], rhs[3] = {-f0[0], -f0[1], -f0[2]};
    for (int c = 0; c < 3; ++c) {
      const double h = std::max(1e-6 * std::abs(x[c]), 1e-9);
      double xp[3] = {x[0], x[1], x[2]};
      xp[c] += h;
      const auto fp = stationary(xp[0], xp[1], xp[2]);
      for (int r = 0; r < 3; ++r) jac[r * 3 + c] = (fp[r] - f0[r]) / h;
    }
    solve_dense(std::span<double>(jac, 9), std::span<double>(rhs, 3), 3);
    for (int c = 0; c < 3; ++c) x[c] += rhs[c];
  }
  const double n_fixed = x[2] * x[2];
  REQUIRE(n_fixed > 1e8);  // far above the thermal occupancy

  SimConfig cfg;
  cfg.dt = 0.8e-9;
  cfg.duration = 250e-6;
  cfg.decimation = 64;
  cfg.noise_enabled = true;
  cfg.seed = 2024;
  NoiseModel noise;
  noise.n_th = 1.56e5;
  State init;
  init.b_amp = std::sqrt(noise.n_th);
  const Trajectory traj = integrate(cfg, mol, dev.mech, pump, noise, init);
  const PhononStats st = steady_phonon_number(traj, 0.6);

  CHECK(st.mean > 100.0 * noise.n_th);  // plateau far above thermal
  CHECK(rel(st.mean, n_fixed) < 0.10);
}

TEST_CASE("frame independence and gauge symmetry") {
  const Device dev = make_paper_device();

  SUBCASE("shifting the laser frame leaves norms unchanged") {
    // The shift moves every optical reference together; the physical
    // coefficients (rabi rate, photon flux, decay rates) are held fixed.
    const double rabi = dev.rabi();
    const Supermodes sm0 = dev.molecule().eigenmodes();
    const double p0 = 2.0 * threshold_power(sm0, dev.mech, rabi, false);

    auto run = [&](double shift) {
      Device d = dev;
      d.mode1.omega += shift;
      d.mode2.omega += shift;
      const Supermodes sm = d.molecule().eigenmodes();
      PumpConfig pump{p0 * (sm.omega_plus / sm0.omega_plus), sm.omega_plus, Branch::Blue};
      SimConfig cfg;
      cfg.dt = 0.8e-9;
      cfg.duration = 30e-6;
      cfg.decimation = 128;
      State init;
      init.b_amp = 1e3;
      return integrate(cfg, d.molecule(), d.mech, pump, NoiseModel{}, init, rabi);
    };
    const Trajectory a = run(0.0);
    const Trajectory b = run(kTwoPi * 50e6);
    REQUIRE(a.states.size() == b.states.size());
    double worst = 0.0;
    for (size_t i = 0; i < a.states.size(); ++i) {
      worst = std::max(worst, rel(std::abs(b.states[i].a_plus), std::abs(a.states[i].a_plus)));
      worst = std::max(worst, rel(std::abs(b.states[i].a_minus), std::abs(a.states[i].a_minus)));
      worst = std::max(worst, rel(std::abs(b.states[i].b_amp), std::abs(a.states[i].b_amp)));
    }
    CHECK(worst < 1e-9);
  }

  SUBCASE("U(1) phase family leaves norms identical") {
    ToyHamiltonian toy;
    SimConfig cfg;
    cfg.dt = 0.5;
    cfg.duration = 2e4;
    cfg.decimation = 40;
    cfg.damping_enabled = false;
    const State base{cplx(0.9, 0.0), 0.45 * std::polar(1.0, 0.63), 0.7 * std::polar(1.0, -0.45)};

    auto norms_of = [&](const State& init) {
      const Trajectory t = integrate(cfg, toy.mol, toy.mech, toy.pump, NoiseModel{}, init, 0.01);
      std::vector<double> out;
      for (const State& s : t.states) {
        out.push_back(std::norm(s.a_plus));
        out.push_back(std::norm(s.a_minus));
        out.push_back(std::norm(s.b_amp));
      }
      return out;
    };
    const auto ref = norms_of(base);

    // Generators: (a+, b) -> e^{ia}(a+, b) and (a-, b) -> (e^{ib} a-, e^{-ib} b).
    const cplx pa = std::polar(1.0, 1.1), pb = std::polar(1.0, -0.7);
    const State g1{pa * base.a_plus, base.a_minus, pa * base.b_amp};
    const State g2{base.a_plus, pb * base.a_minus, std::conj(pb) * base.b_amp};
    const State optical{pa * base.a_plus, pa * base.a_minus, base.b_amp};

    for (const State& init : {g1, g2, optical}) {
      const auto got = norms_of(init);
      double worst = 0.0;
      for (size_t i = 0; i < ref.size(); ++i)
        worst = std::max(worst, std::abs(got[i] - ref[i]) / std::max(ref[i], 1e-300));
      CHECK(worst < 1e-11);
    }
  }
}

TEST_CASE("determinism and stream independence") {
  const Device dev = make_paper_device();
  const PumpConfig pump = blue_resonant(dev, 0.0);
  NoiseModel noise;
  noise.n_th = 1.56e5;
  SimConfig cfg;
  cfg.dt = 0.8e-9;
  cfg.duration = 20e-6;
  cfg.decimation = 64;
  cfg.noise_enabled = true;
  cfg.seed = 99;
  cfg.run_index = 3;

  const Trajectory a = integrate(cfg, dev.molecule(), dev.mech, pump, noise, State{});
  const Trajectory b = integrate(cfg, dev.molecule(), dev.mech, pump, noise, State{});
  REQUIRE(a.states.size() == b.states.size());
  for (size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i].b_amp == b.states[i].b_amp);  // bit identical
  }

  SimConfig other = cfg;
  other.run_index = 4;
  const Trajectory c = integrate(other, dev.molecule(), dev.mech, pump, noise, State{});
  CHECK(c.states.back().b_amp != a.states.back().b_amp);
}

TEST_CASE("validation and abort paths") {
  const Device dev = make_paper_device();
  const PumpConfig pump = blue_resonant(dev, 0.0);

  SimConfig cfg;
  cfg.dt = 0.8e-9;
  cfg.duration = 50 * cfg.dt;  // violates duration >= 100 dt
  CHECK_THROWS_AS(integrate(cfg, dev.molecule(), dev.mech, pump, NoiseModel{}, State{}),
                  validation_error);

  cfg.duration = 2e-6;
  cfg.decimation = 100000;
  CHECK_THROWS_AS(integrate(cfg, dev.molecule(), dev.mech, pump, NoiseModel{}, State{}),
                  validation_error);

  // A wildly oversized step on a driven system diverges and is aborted.
  SimConfig wild;
  wild.dt = 1e-3;
  wild.duration = 1.0;
  wild.decimation = 100;
  wild.skip_dt_check = true;
  const PumpConfig hot = blue_resonant(dev, 1e-3);
  CHECK_THROWS_WITH_AS(
      integrate(wild, dev.molecule(), dev.mech, hot, NoiseModel{}, State{}),
      doctest::Contains("non-finite"), compute_error);
}
