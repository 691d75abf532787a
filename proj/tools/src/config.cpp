#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "pmol/io.hpp"
#include "pmol/units.hpp"

namespace pmol::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using RawSection = std::vector<std::pair<std::string, std::string>>;
using RawConfig = std::map<std::string, RawSection>;

const std::vector<std::string> kSections = {"device", "mech", "pump", "sim", "experiment",
                                            "output"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw validation_error("config line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        throw validation_error("unknown config section [" + section + "]");
      raw.try_emplace(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw validation_error("config line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (const auto& [k, v] : raw[section])
      if (k == key) throw validation_error("duplicate key " + section + "." + key);
    raw[section].emplace_back(key, value);
  }
  return raw;
}

void apply_overrides(RawConfig& raw, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw validation_error("override '" + ov + "' must look like section.key=value");
    const std::string section = trim(ov.substr(0, dot));
    const std::string key = trim(ov.substr(dot + 1, eq - dot - 1));
    const std::string value = trim(ov.substr(eq + 1));
    if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
      throw validation_error("override names unknown section [" + section + "]");
    auto& sec = raw[section];
    for (auto& [k, v] : sec) {
      if (k == key) {
        v = value;
        goto next;
      }
    }
    sec.emplace_back(key, value);
  next:;
  }
}

/// Tracks consumed keys so leftovers can be rejected by name.
class Section {
 public:
  Section(RawConfig& raw, std::string name) : name_(std::move(name)) {
    if (auto it = raw.find(name_); it != raw.end()) entries_ = it->second;
  }

  std::optional<std::string> take(const std::string& key) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        consumed_.push_back(key);
        return v;
      }
    }
    return std::nullopt;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw validation_error("missing required key " + name_ + "." + key);
    return *v;
  }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return true;
    return false;
  }

  double quantity(const std::string& key, units::Dim dim) {
    const std::string text = require(key);
    return convert(key, text, dim);
  }

  double quantity_or(const std::string& key, units::Dim dim, double fallback) {
    auto v = take(key);
    return v ? convert(key, *v, dim) : fallback;
  }

  /// Linear frequency with unit suffix, converted to angular rad/s.
  double angular(const std::string& key) {
    return kTwoPi * quantity(key, units::Dim::Frequency);
  }
  double angular_or(const std::string& key, double fallback) {
    auto v = take(key);
    return v ? kTwoPi * convert(key, *v, units::Dim::Frequency) : fallback;
  }

  /// Raw SI number (no unit suffix allowed) -- used by resolved echoes.
  double raw_number(const std::string& key) {
    return convert(key, require(key), units::Dim::Dimensionless);
  }

  double number_or(const std::string& key, double fallback) {
    auto v = take(key);
    return v ? convert(key, *v, units::Dim::Dimensionless) : fallback;
  }

  long long int_or(const std::string& key, long long fallback) {
    auto v = take(key);
    if (!v) return fallback;
    const double d = convert(key, *v, units::Dim::Dimensionless);
    if (d != std::floor(d)) throw validation_error(name_ + "." + key + " must be an integer");
    return (long long)d;
  }

  bool bool_or(const std::string& key, bool fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (*v == "on" || *v == "true" || *v == "yes") return true;
    if (*v == "off" || *v == "false" || *v == "no") return false;
    throw validation_error(name_ + "." + key + " must be on/off");
  }

  std::vector<double> angular_list(const std::string& key) {
    const std::string text = require(key);
    std::vector<double> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(kTwoPi * convert(key, item, units::Dim::Frequency));
    }
    if (out.empty()) throw validation_error(name_ + "." + key + " list is empty");
    return out;
  }

  std::vector<double> raw_list(const std::string& key) {
    const std::string text = require(key);
    std::vector<double> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(convert(key, item, units::Dim::Dimensionless));
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : entries_) {
      if (std::find(consumed_.begin(), consumed_.end(), k) == consumed_.end())
        throw validation_error("unknown key " + name_ + "." + k);
    }
  }

 private:
  double convert(const std::string& key, const std::string& text, units::Dim dim) {
    units::Quantity q;
    try {
      q = units::parse_quantity(text);
    } catch (const validation_error& e) {
      throw validation_error(name_ + "." + key + ": " + e.what());
    }
    if (dim == units::Dim::Dimensionless && q.dim != units::Dim::Dimensionless)
      throw validation_error(name_ + "." + key + " must be a bare number");
    if (dim != units::Dim::Dimensionless && q.dim != dim && q.dim != units::Dim::Dimensionless)
      throw validation_error(name_ + "." + key + " must carry a " +
                             std::string(units::dim_name(dim)) + " unit");
    return q.value;
  }

  std::string name_;
  RawSection entries_;
  std::vector<std::string> consumed_;
};

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw validation_error(what + " must be > 0");
}

Device parse_device(RawConfig& raw) {
  Section dev(raw, "device");
  Section mech(raw, "mech");
  Device d;

  if (dev.has("omega_1")) {  // resolved low-level form
    d.mode1.omega = dev.raw_number("omega_1");
    d.mode1.gamma_intrinsic = dev.raw_number("gamma_intrinsic_1");
    d.mode1.gamma_ext = dev.raw_number("gamma_ext_1");
    d.mode2.omega = dev.raw_number("omega_2");
    d.mode2.gamma_intrinsic = dev.raw_number("gamma_intrinsic_2");
    d.mode2.gamma_ext = dev.raw_number("gamma_ext_2");
    d.kappa = dev.raw_number("kappa");
    d.coupling.kappa_0 = dev.raw_number("kappa_0");
    d.coupling.decay_length = dev.quantity("decay_length", units::Dim::Length);
    d.mech.radius_host = dev.quantity("radius", units::Dim::Length);

    d.mech.omega_m = mech.raw_number("omega_m");
    d.mech.gamma_m = mech.raw_number("gamma_m");
    d.mech.m_eff = mech.quantity("m_eff", units::Dim::Mass);
  } else {
    const double lambda = dev.quantity("wavelength", units::Dim::Length);
    check_positive(lambda, "device.wavelength");
    const double omega0 = kTwoPi * codata.c_light / lambda;
    const double q_opt = dev.raw_number("q_opt");
    check_positive(q_opt, "device.q_opt");
    const double q_opt_2 = dev.number_or("q_opt_2", q_opt);
    check_positive(q_opt_2, "device.q_opt_2");
    const double taper_fraction = dev.number_or("taper_fraction", 0.5);
    if (!(taper_fraction >= 0.0 && taper_fraction <= 1.0))
      throw validation_error("device.taper_fraction must be in [0,1]");

    const double g1 = omega0 / q_opt;
    d.mode1 = {omega0, (1.0 - taper_fraction) * g1, taper_fraction * g1};
    d.mode2 = {omega0, omega0 / q_opt_2, 0.0};
    d.coupling.kappa_0 = dev.angular_or("kappa0", kTwoPi * 5e9);
    d.coupling.decay_length = dev.quantity_or("decay_length", units::Dim::Length, 120e-9);
    d.mech.radius_host = dev.quantity("radius", units::Dim::Length);

    const double f_m = mech.quantity("frequency", units::Dim::Frequency);
    check_positive(f_m, "mech.frequency");
    const double q_mech = mech.raw_number("q_mech");
    if (!(q_mech > 0.0)) throw validation_error("mech.q_mech must be > 0");
    d.mech.omega_m = kTwoPi * f_m;
    d.mech.gamma_m = d.mech.omega_m / q_mech;
    d.mech.m_eff = mech.quantity("m_eff", units::Dim::Mass);

    const double splitting = dev.angular_or("splitting", d.mech.omega_m);
    d.kappa = 0.5 * splitting;
  }

  dev.finish();
  mech.finish();
  d.molecule().validate();
  d.mech.validate();
  d.coupling.validate();
  return d;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  RawConfig raw = parse_raw(text);
  apply_overrides(raw, overrides);

  RunConfig cfg;
  cfg.device = parse_device(raw);

  Section pump(raw, "pump");
  cfg.pump_power = pump.quantity_or("power", units::Dim::Power, 0.0);
  if (cfg.pump_power < 0.0) throw validation_error("pump.power must be >= 0");
  if (auto b = pump.take("branch")) cfg.branch = branch_from_string(*b);
  if (pump.has("detuning_rad_s"))
    cfg.pump_detuning = pump.raw_number("detuning_rad_s");
  else
    cfg.pump_detuning = pump.angular_or("detuning", 0.0);
  cfg.pump_at_fwhm = pump.bool_or("at_fwhm", false);
  pump.finish();

  Section sim(raw, "sim");
  if (auto dt = sim.take("dt")) {
    if (*dt != "auto") {
      const units::Quantity q = units::parse_quantity(*dt);
      if (q.dim != units::Dim::Time) throw validation_error("sim.dt must be a time or 'auto'");
      cfg.dt = q.value;
      check_positive(cfg.dt, "sim.dt");
    }
  }
  cfg.duration = sim.quantity_or("duration", units::Dim::Time, 0.0);
  if (auto dec = sim.take("decimation")) {
    if (*dec != "auto") {
      cfg.decimation = int(std::stoll(*dec));
      if (cfg.decimation < 1) throw validation_error("sim.decimation must be >= 1");
    }
  }
  cfg.noise = sim.bool_or("noise", true);
  cfg.temperature = sim.quantity_or("temperature", units::Dim::Temperature, 300.0);
  if (cfg.temperature < 0.0) throw validation_error("sim.temperature must be >= 0");
  if (sim.has("n_th")) cfg.n_th_override = sim.raw_number("n_th");
  cfg.clamp = sim.bool_or("clamp", false);
  cfg.seed = uint64_t(sim.int_or("seed", 1));
  sim.finish();

  Section exp(raw, "experiment");
  if (auto name = exp.take("name")) cfg.experiment.name = *name;
  cfg.experiment.power_min = exp.quantity_or("power_min", units::Dim::Power, 0.0);
  cfg.experiment.power_max = exp.quantity_or("power_max", units::Dim::Power, 0.0);
  cfg.experiment.points = int(exp.int_or("points", 0));
  cfg.experiment.include_zero = exp.bool_or("include_zero", true);
  cfg.experiment.gap_min = exp.quantity_or("gap_min", units::Dim::Length, 0.0);
  cfg.experiment.gap_max = exp.quantity_or("gap_max", units::Dim::Length, 0.0);
  if (exp.has("detune_span_rad_s"))
    cfg.experiment.detune_span = exp.raw_number("detune_span_rad_s");
  else
    cfg.experiment.detune_span = exp.angular_or("detune_span", 0.0);
  if (exp.has("splittings_rad_s"))
    cfg.experiment.splittings = exp.raw_list("splittings_rad_s");
  else if (exp.has("splittings"))
    cfg.experiment.splittings = exp.angular_list("splittings");
  if (exp.has("bg_from_rad_s")) {
    cfg.experiment.bg_from = exp.raw_number("bg_from_rad_s");
    cfg.experiment.bg_to = exp.raw_number("bg_to_rad_s");
    cfg.experiment.bg_spacing = exp.raw_number("bg_spacing_rad_s");
    cfg.experiment.bg_linewidth = exp.raw_number("bg_linewidth_rad_s");
  } else {
    cfg.experiment.bg_from = exp.angular_or("bg_from", 0.0);
    cfg.experiment.bg_to = exp.angular_or("bg_to", 0.0);
    cfg.experiment.bg_spacing = exp.angular_or("bg_spacing", 0.0);
    cfg.experiment.bg_linewidth = exp.angular_or("bg_linewidth", 0.0);
  }
  exp.finish();

  Section out(raw, "output");
  if (auto dir = out.take("directory")) cfg.out_dir = *dir;
  out.finish();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string echo_config(const RunConfig& cfg) {
  using units::Dim;
  using units::format_quantity;
  std::ostringstream out;
  const Device& d = cfg.device;
  out << "# resolved configuration (SI base units; omega_*, gamma_*, kappa*,\n"
      << "# *_rad_s and n_th are raw angular rates in rad/s or 1/s)\n";
  out << "[device]\n";
  out << "omega_1 = " << io::g17(d.mode1.omega) << "\n";
  out << "gamma_intrinsic_1 = " << io::g17(d.mode1.gamma_intrinsic) << "\n";
  out << "gamma_ext_1 = " << io::g17(d.mode1.gamma_ext) << "\n";
  out << "omega_2 = " << io::g17(d.mode2.omega) << "\n";
  out << "gamma_intrinsic_2 = " << io::g17(d.mode2.gamma_intrinsic) << "\n";
  out << "gamma_ext_2 = " << io::g17(d.mode2.gamma_ext) << "\n";
  out << "kappa = " << io::g17(d.kappa) << "\n";
  out << "kappa_0 = " << io::g17(d.coupling.kappa_0) << "\n";
  out << "decay_length = " << format_quantity(d.coupling.decay_length, Dim::Length) << "\n";
  out << "radius = " << format_quantity(d.mech.radius_host, Dim::Length) << "\n";
  out << "\n[mech]\n";
  out << "omega_m = " << io::g17(d.mech.omega_m) << "\n";
  out << "gamma_m = " << io::g17(d.mech.gamma_m) << "\n";
  out << "m_eff = " << format_quantity(d.mech.m_eff, Dim::Mass) << "\n";
  out << "\n[pump]\n";
  out << "power = " << format_quantity(cfg.pump_power, Dim::Power) << "\n";
  out << "branch = " << to_string(cfg.branch) << "\n";
  out << "detuning_rad_s = " << io::g17(cfg.pump_detuning) << "\n";
  out << "at_fwhm = " << (cfg.pump_at_fwhm ? "on" : "off") << "\n";
  out << "\n[sim]\n";
  out << "dt = " << (cfg.dt > 0.0 ? format_quantity(cfg.dt, Dim::Time) : "auto") << "\n";
  out << "duration = " << format_quantity(cfg.duration, Dim::Time) << "\n";
  out << "decimation = " << (cfg.decimation > 0 ? std::to_string(cfg.decimation) : "auto")
      << "\n";
  out << "noise = " << (cfg.noise ? "on" : "off") << "\n";
  out << "temperature = " << format_quantity(cfg.temperature, Dim::Temperature) << "\n";
  if (cfg.n_th_override) out << "n_th = " << io::g17(*cfg.n_th_override) << "\n";
  out << "clamp = " << (cfg.clamp ? "on" : "off") << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "\n[experiment]\n";
  const ExperimentConfig& e = cfg.experiment;
  if (!e.name.empty()) out << "name = " << e.name << "\n";
  if (e.power_min > 0.0) out << "power_min = " << format_quantity(e.power_min, Dim::Power) << "\n";
  if (e.power_max > 0.0) out << "power_max = " << format_quantity(e.power_max, Dim::Power) << "\n";
  if (e.points > 0) out << "points = " << e.points << "\n";
  out << "include_zero = " << (e.include_zero ? "on" : "off") << "\n";
  if (e.gap_min > 0.0 || e.gap_max > 0.0) {
    out << "gap_min = " << format_quantity(e.gap_min, Dim::Length) << "\n";
    out << "gap_max = " << format_quantity(e.gap_max, Dim::Length) << "\n";
  }
  if (e.detune_span != 0.0) out << "detune_span_rad_s = " << io::g17(e.detune_span) << "\n";
  if (!e.splittings.empty()) {
    out << "splittings_rad_s = ";
    for (size_t i = 0; i < e.splittings.size(); ++i)
      out << (i ? ", " : "") << io::g17(e.splittings[i]);
    out << "\n";
  }
  if (e.bg_spacing > 0.0) {
    out << "bg_from_rad_s = " << io::g17(e.bg_from) << "\n";
    out << "bg_to_rad_s = " << io::g17(e.bg_to) << "\n";
    out << "bg_spacing_rad_s = " << io::g17(e.bg_spacing) << "\n";
    out << "bg_linewidth_rad_s = " << io::g17(e.bg_linewidth) << "\n";
  }
  out << "\n[output]\n";
  if (!cfg.out_dir.empty()) out << "directory = " << cfg.out_dir << "\n";
  return out.str();
}

}  // namespace pmol::cli
