#include "pmol/units.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>

namespace pmol::units {

namespace {

struct UnitDef {
  Dim dim;
  double scale;
};

const std::map<std::string, UnitDef>& unit_table() {
  static const std::map<std::string, UnitDef> table = {
      {"Hz", {Dim::Frequency, 1.0}},   {"kHz", {Dim::Frequency, 1e3}},
      {"MHz", {Dim::Frequency, 1e6}},  {"GHz", {Dim::Frequency, 1e9}},
      {"s", {Dim::Time, 1.0}},         {"ms", {Dim::Time, 1e-3}},
      {"us", {Dim::Time, 1e-6}},       {"ns", {Dim::Time, 1e-9}},
      {"ps", {Dim::Time, 1e-12}},      {"W", {Dim::Power, 1.0}},
      {"mW", {Dim::Power, 1e-3}},      {"uW", {Dim::Power, 1e-6}},
      {"nW", {Dim::Power, 1e-9}},      {"m", {Dim::Length, 1.0}},
      {"mm", {Dim::Length, 1e-3}},     {"um", {Dim::Length, 1e-6}},
      {"nm", {Dim::Length, 1e-9}},     {"pm", {Dim::Length, 1e-12}},
      {"kg", {Dim::Mass, 1.0}},        {"g", {Dim::Mass, 1e-3}},
      {"mg", {Dim::Mass, 1e-6}},       {"K", {Dim::Temperature, 1.0}},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

const char* dim_name(Dim dim) {
  switch (dim) {
    case Dim::Dimensionless: return "dimensionless";
    case Dim::Frequency: return "frequency";
    case Dim::Time: return "time";
    case Dim::Power: return "power";
    case Dim::Length: return "length";
    case Dim::Mass: return "mass";
    case Dim::Temperature: return "temperature";
  }
  return "?";
}

Quantity parse_quantity(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw validation_error("empty quantity");

  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw validation_error("quantity '" + s + "' has no numeric part");
  const std::string unit = trim(std::string(end));
  if (unit.empty()) return {value, Dim::Dimensionless};

  const auto it = unit_table().find(unit);
  if (it == unit_table().end())
    throw validation_error("unknown unit '" + unit + "' in quantity '" + s + "'");
  return {value * it->second.scale, it->second.dim};
}

std::string format_quantity(double value, Dim dim) {
  const char* suffix = "";
  switch (dim) {
    case Dim::Dimensionless: suffix = ""; break;
    case Dim::Frequency: suffix = " Hz"; break;
    case Dim::Time: suffix = " s"; break;
    case Dim::Power: suffix = " W"; break;
    case Dim::Length: suffix = " m"; break;
    case Dim::Mass: suffix = " kg"; break;
    case Dim::Temperature: suffix = " K"; break;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g%s", value, suffix);
  return buf;
}

}  // namespace pmol::units
