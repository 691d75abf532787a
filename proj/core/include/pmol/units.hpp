#pragma once

#include <string>

#include "pmol/errors.hpp"

namespace pmol::units {

enum class Dim { Dimensionless, Frequency, Time, Power, Length, Mass, Temperature };

struct Quantity {
  double value = 0.0;  // in the SI base unit of the dimension
  Dim dim = Dim::Dimensionless;
};

/// Parse "40 MHz", "31.5 um", "5e-11 kg", "19 uW", "300 K", "0.5".
/// Unknown units are rejected.
Quantity parse_quantity(const std::string& text);

/// Canonical form with the SI base suffix; round-trips bit exactly through
/// parse_quantity.
std::string format_quantity(double value, Dim dim);

const char* dim_name(Dim dim);

}  // namespace pmol::units
