#pragma once

namespace pmol {

/// Fixed CODATA (2018 exact SI) values. Not configurable.
struct PhysicalConstants {
  double hbar;     // J*s
  double c_light;  // m/s
  double k_B;      // J/K
};

inline constexpr PhysicalConstants codata{1.054571817e-34, 299792458.0, 1.380649e-23};

}  // namespace pmol
