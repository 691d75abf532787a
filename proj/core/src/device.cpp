#include "pmol/device.hpp"

namespace pmol {

std::string to_string(Branch b) { return b == Branch::Blue ? "blue" : "red"; }

Branch branch_from_string(const std::string& name) {
  if (name == "blue") return Branch::Blue;
  if (name == "red") return Branch::Red;
  throw validation_error("unknown branch '" + name + "' (expected blue or red)");
}

void OpticalMode::validate() const {
  if (!(omega > 0.0)) throw validation_error("OpticalMode.omega must be > 0");
  if (gamma_intrinsic < 0.0) throw validation_error("OpticalMode.gamma_intrinsic must be >= 0");
  if (gamma_ext < 0.0) throw validation_error("OpticalMode.gamma_ext must be >= 0");
}

void MechanicalMode::validate() const {
  if (!(omega_m > 0.0)) throw validation_error("MechanicalMode.omega_m must be > 0");
  if (!(gamma_m > 0.0)) throw validation_error("MechanicalMode.gamma_m must be > 0");
  if (!(gamma_m < omega_m))
    throw validation_error("MechanicalMode must be underdamped (gamma_m < omega_m)");
  if (!(m_eff > 0.0)) throw validation_error("MechanicalMode.m_eff must be > 0");
  if (!(radius_host > 0.0)) throw validation_error("MechanicalMode.radius_host must be > 0");
}

void CouplingModel::validate() const {
  if (!(kappa_0 > 0.0)) throw validation_error("CouplingModel.kappa_0 must be > 0");
  if (!(decay_length > 0.0)) throw validation_error("CouplingModel.decay_length must be > 0");
}

void PumpConfig::validate() const {
  if (power_in < 0.0) throw validation_error("PumpConfig.power_in must be >= 0");
  if (!(omega_laser > 0.0)) throw validation_error("PumpConfig.omega_laser must be > 0");
}

}  // namespace pmol
