#pragma once

#include <string>

#include "pmol/errors.hpp"

namespace pmol {

/// Which supermode the pump laser addresses. Blue is the upper branch and
/// gives positive inversion (phonon gain), red the lower branch (cooling).
enum class Branch { Blue, Red };

std::string to_string(Branch b);
Branch branch_from_string(const std::string& name);

/// One whispering-gallery mode. gamma_ext is the taper coupling rate and is
/// meaningful only for the taper-coupled resonator.
struct OpticalMode {
  double omega = 0.0;            // angular frequency, rad/s
  double gamma_intrinsic = 0.0;  // intrinsic energy decay rate, 1/s
  double gamma_ext = 0.0;        // taper coupling rate, 1/s

  double gamma_loaded() const { return gamma_intrinsic + gamma_ext; }
  bool operator==(const OpticalMode&) const = default;
  void validate() const;
};

/// Mechanical (crown) mode of the host microtoroid.
struct MechanicalMode {
  double omega_m = 0.0;      // angular frequency Omega_0, rad/s
  double gamma_m = 0.0;      // energy decay rate Gamma, 1/s
  double m_eff = 0.0;        // effective mass, kg
  double radius_host = 0.0;  // radius R of the microtoroid hosting the mode, m

  bool operator==(const MechanicalMode&) const = default;
  void validate() const;
};

/// Exponential gap law for the inter-resonator coupling rate:
/// kappa(gap) = kappa_0 * exp(-gap / decay_length).
struct CouplingModel {
  double kappa_0 = 0.0;       // coupling at zero gap, rad/s
  double decay_length = 0.0;  // gap e-folding scale, m

  bool operator==(const CouplingModel&) const = default;
  void validate() const;
};

struct PumpConfig {
  double power_in = 0.0;     // coupled pump power, W
  double omega_laser = 0.0;  // rad/s
  Branch branch = Branch::Blue;

  void validate() const;
};

}  // namespace pmol
