#include "pmol/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pmol::io {

using nlohmann::json;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json sim_to_json(const SimConfig& c) {
  return {{"dt", c.dt},
          {"duration", c.duration},
          {"seed", c.seed},
          {"run_index", c.run_index},
          {"decimation", c.decimation},
          {"noise_enabled", c.noise_enabled},
          {"damping_enabled", c.damping_enabled},
          {"clamp_pump", c.clamp_pump}};
}

SimConfig sim_from_json(const json& j) {
  SimConfig c;
  c.dt = j.at("dt");
  c.duration = j.at("duration");
  c.seed = j.at("seed");
  c.run_index = j.at("run_index");
  c.decimation = j.at("decimation");
  c.noise_enabled = j.at("noise_enabled");
  c.damping_enabled = j.at("damping_enabled");
  c.clamp_pump = j.at("clamp_pump");
  return c;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void write_trajectory(const std::filesystem::path& csv_path, const Trajectory& traj) {
  std::ofstream out(csv_path);
  if (!out) throw validation_error("cannot open " + csv_path.string() + " for writing");
  out << "t_s,re_aplus,im_aplus,re_aminus,im_aminus,re_b,im_b\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const State& s = traj.states[i];
    out << g17(traj.times[i]) << ',' << g17(s.a_plus.real()) << ',' << g17(s.a_plus.imag())
        << ',' << g17(s.a_minus.real()) << ',' << g17(s.a_minus.imag()) << ','
        << g17(s.b_amp.real()) << ',' << g17(s.b_amp.imag()) << '\n';
  }

  const auto& m = traj.meta;
  json j = {
      {"sim", sim_to_json(m.sim)},
      {"noise", {{"n_th", m.noise.n_th}, {"bath_temp", m.noise.bath_temp},
                 {"optical_noise", m.noise.optical_noise}}},
      {"pump", {{"power_in", m.pump.power_in}, {"omega_laser", m.pump.omega_laser},
                {"branch", to_string(m.pump.branch)}}},
      {"supermodes", {{"omega_plus", m.modes.omega_plus}, {"omega_minus", m.modes.omega_minus},
                      {"splitting", m.modes.splitting}, {"mixing_angle", m.modes.mixing_angle},
                      {"gamma_plus", m.modes.gamma_plus}, {"gamma_minus", m.modes.gamma_minus},
                      {"gamma_bar", m.modes.gamma_bar}}},
      {"mech", {{"omega_m", m.mech.omega_m}, {"gamma_m", m.mech.gamma_m},
                {"m_eff", m.mech.m_eff}, {"radius_host", m.mech.radius_host}}},
      {"rabi", m.rabi},
      {"gamma_ext", m.gamma_ext},
      {"mixing_angle", m.mixing_angle},
      {"drive_on", m.drive_on},
      {"frames", {{"optics", "laser"}, {"mechanics", "splitting"},
                  {"omega_laser", traj.frames.omega_laser},
                  {"delta_omega", traj.frames.delta_omega},
                  {"delta_drive", traj.frames.delta_drive},
                  {"mech_residual", traj.frames.mech_residual},
                  {"branch", to_string(traj.frames.branch)}}},
  };
  std::ofstream side(sidecar_path(csv_path));
  side << j.dump(2) << '\n';
}

Trajectory read_trajectory(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw validation_error("cannot open " + csv_path.string());
  std::ifstream side(sidecar_path(csv_path));
  if (!side)
    throw validation_error("missing trajectory sidecar " + sidecar_path(csv_path).string());

  Trajectory traj;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[7];
    std::istringstream ss(line);
    std::string cell;
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw validation_error("malformed trajectory row");
      x = std::stod(cell);
    }
    traj.times.push_back(v[0]);
    traj.states.push_back({{v[1], v[2]}, {v[3], v[4]}, {v[5], v[6]}});
  }

  json j;
  side >> j;
  auto& m = traj.meta;
  m.sim = sim_from_json(j.at("sim"));
  m.noise.n_th = j.at("noise").at("n_th");
  m.noise.bath_temp = j.at("noise").at("bath_temp");
  m.noise.optical_noise = j.at("noise").at("optical_noise");
  m.pump.power_in = j.at("pump").at("power_in");
  m.pump.omega_laser = j.at("pump").at("omega_laser");
  m.pump.branch = branch_from_string(j.at("pump").at("branch"));
  const json& sm = j.at("supermodes");
  m.modes = {sm.at("omega_plus"),  sm.at("omega_minus"), sm.at("splitting"),
             sm.at("mixing_angle"), sm.at("gamma_plus"),  sm.at("gamma_minus"),
             sm.at("gamma_bar")};
  const json& me = j.at("mech");
  m.mech = {me.at("omega_m"), me.at("gamma_m"), me.at("m_eff"), me.at("radius_host")};
  m.rabi = j.at("rabi");
  m.gamma_ext = j.at("gamma_ext");
  m.mixing_angle = j.at("mixing_angle");
  m.drive_on = j.at("drive_on");
  const json& fr = j.at("frames");
  traj.frames = {fr.at("omega_laser"), fr.at("delta_omega"), fr.at("delta_drive"),
                 fr.at("mech_residual"), branch_from_string(fr.at("branch"))};
  return traj;
}

void write_psd(const std::filesystem::path& csv_path, const PSD& psd) {
  std::ofstream out(csv_path);
  if (!out) throw validation_error("cannot open " + csv_path.string() + " for writing");
  out << "freq_hz,psd\n";
  for (size_t i = 0; i < psd.freqs.size(); ++i)
    out << g17(psd.freqs[i]) << ',' << g17(psd.values[i]) << '\n';

  json j = {{"resolution_bw_hz", psd.resolution_bw},
            {"scaling", "one-sided density"},
            {"estimator",
             {{"window", psd.estimator.window},
              {"segment_length", psd.estimator.segment_length},
              {"overlap", psd.estimator.overlap},
              {"segment_count", psd.estimator.segment_count},
              {"sample_rate", psd.estimator.sample_rate},
              {"enbw_bins", psd.estimator.enbw_bins},
              {"parseval_ratio", psd.estimator.parseval_ratio}}}};
  std::ofstream side(sidecar_path(csv_path));
  side << j.dump(2) << '\n';
}

}  // namespace pmol::io
