#include "ionmcmr/units.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "ionmcmr/error.hpp"

namespace ionmcmr::units {

namespace {

struct UnitEntry {
  std::string_view suffix;
  double scale;
};

// Field inputs are accepted in gauss only; tesla-scale typos are the common mistake.
constexpr UnitEntry frequency_units[] = {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
constexpr UnitEntry field_units[] = {{"G", gauss}, {"mG", 1e-3 * gauss}};
constexpr UnitEntry intensity_units[] = {
    {"W/m2", 1.0}, {"W/cm2", 1e4}, {"kW/cm2", 1e7}, {"MW/cm2", mw_per_cm2}};
constexpr UnitEntry time_units[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
constexpr UnitEntry length_units[] = {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};

std::pair<const UnitEntry*, const UnitEntry*> table_for(Dimension dim) {
  switch (dim) {
    case Dimension::Frequency: return {std::begin(frequency_units), std::end(frequency_units)};
    case Dimension::MagneticField: return {std::begin(field_units), std::end(field_units)};
    case Dimension::Intensity: return {std::begin(intensity_units), std::end(intensity_units)};
    case Dimension::Time: return {std::begin(time_units), std::end(time_units)};
    case Dimension::Length: return {std::begin(length_units), std::end(length_units)};
    case Dimension::Dimensionless: break;
  }
  return {nullptr, nullptr};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

const char* dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::Frequency: return "frequency (Hz, kHz, MHz, GHz)";
    case Dimension::MagneticField: return "magnetic field (G, mG)";
    case Dimension::Intensity: return "intensity (W/m2, W/cm2, kW/cm2, MW/cm2)";
    case Dimension::Time: return "time (s, ms, us, ns)";
    case Dimension::Length: return "length (m, mm, um, nm)";
    case Dimension::Dimensionless: return "dimensionless";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension dim) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data()) {
    throw ConfigError("cannot parse a number from '" + std::string(text) + "'");
  }
  const std::string_view unit = trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)));
  if (!std::isfinite(value)) throw ConfigError("non-finite quantity '" + std::string(text) + "'");

  if (dim == Dimension::Dimensionless) {
    if (!unit.empty()) throw ConfigError("unexpected unit in dimensionless value '" + std::string(text) + "'");
    return value;
  }
  const auto [first, last] = table_for(dim);
  for (auto it = first; it != last; ++it) {
    if (it->suffix == unit) return value * it->scale;
  }
  throw ConfigError("malformed unit in '" + std::string(text) + "': expected " + dimension_name(dim));
}

}  // namespace ionmcmr::units
